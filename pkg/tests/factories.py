"""Random star-like automata for property tests."""
import numpy as np

from trie_smooth import Alphabet, Pfa, check_dichotomy, to_star_like

SYMBOLS = "abcd"


def random_star_like(rng, r=None, v=None, max_rho=0.6, min_eta=0.05, sparse=False):
    """A canonical star-like PFA with ``r`` symbols and ``v`` output states.

    With ``sparse`` each symbol reaches a single output state, so the
    result is read-semi-deterministic.
    """
    r = r or int(rng.integers(2, 5))
    v = v or int(rng.integers(1, 7))
    alphabet = Alphabet(tuple(SYMBOLS[:r]))
    out = [f"w{k}" for k in range(v)]
    # small concentrations give peaked rows and push delta toward 1
    conc = float(rng.choice([0.2, 1.0, 5.0]))
    read, write = {}, {}
    for a in alphabet.symbols:
        rho = float(rng.uniform(0, max_rho))
        if rho > 0:
            read[("s", a, "s")] = rho
        if sparse:
            read[("s", a, out[int(rng.integers(v))])] = 1.0 - rho
        else:
            for q, x in zip(out, rng.dirichlet(np.full(v, conc))):
                read[("s", a, q)] = read.get(("s", a, q), 0.0) + (1.0 - rho) * float(x)
    for q in out:
        eta = float(rng.uniform(min_eta, 1.0))
        loop = (1.0 - eta) * rng.dirichlet(np.full(r, conc))
        ret = eta * rng.dirichlet(np.full(r, conc))
        for b, x, y in zip(alphabet.symbols, loop, ret):
            if x > 0:
                write[(q, b, q)] = float(x)
            if y > 0:
                write[(q, b, "s")] = float(y)
    return Pfa.from_tables(alphabet, ["s"], out, read, write, {"s": 1.0})


def random_logarithmic(rng, **kwargs):
    """Rejection-sample :func:`random_star_like` until the verdict is Logarithmic."""
    while True:
        pfa = random_star_like(rng, **kwargs)
        star = to_star_like(pfa)
        if check_dichotomy(star).is_logarithmic:
            return star
