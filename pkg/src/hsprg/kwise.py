"""Explicit k-wise independent sample spaces over {-1,+1}^n.

The generator maps an s-bit seed to a cube point through a binary matrix:
point bit i is the parity of the seed ANDed with column i.  Every
k-coordinate projection of the induced distribution is exactly uniform iff
every set of at most k columns is linearly independent over GF(2).

Columns come from the classic dual-BCH construction: column i holds the bit
expansions of the odd powers (alpha_i, alpha_i^3, ..., alpha_i^(2e-1)) of
the i-th nonzero element of GF(2^m), m = ceil(log2(n+1)), topped by a
constant-1 bit when k is odd.  With e = ceil((k-1)/2) odd powers this gives
independence level 2e+1 when the constant row is present and 2e when it is
not, with seed lengths 1 + e*m and e*m respectively; the even-k variant is
what makes (n=3, k=2) the familiar 4-point pairwise space.

The construction is only trusted after verification: ``verify_kwise``
recounts every projection cell exhaustively over all 2^s seeds.

Spaces are immutable and sampling is pure; support enumeration may be
partitioned by seed ranges, and reductions over the support stay exact
(integer tallies), so merges are order-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidInputError, ResourceLimitError

SEED_ENUM_LIMIT = 34  # past this, use streaming Monte Carlo over seeds
VERIFY_CELL_LIMIT = 1 << 26


# ---------------------------------------------------------------------------
# GF(2^m) arithmetic on integer bit representations


def _gf2_poly_mulmod(a: int, b: int, modulus: int, m: int) -> int:
    """Carry-less multiply of a and b reduced modulo the field polynomial."""
    top = 1 << m
    res = 0
    while b:
        if b & 1:
            res ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= modulus
    return res


def _gf2_poly_mod(a: int, modulus: int) -> int:
    dm = modulus.bit_length() - 1
    while a.bit_length() - 1 >= dm and a:
        a ^= modulus << (a.bit_length() - 1 - dm)
    return a


def _gf2_poly_mul(a: int, b: int) -> int:
    res = 0
    shift = 0
    while b:
        if b & 1:
            res ^= a << shift
        b >>= 1
        shift += 1
    return res


def _gf2_poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _gf2_poly_mod(a, b)
    return a


def _gf2_powmod_x(exp: int, modulus: int) -> int:
    """x^exp modulo the field polynomial, by square and multiply."""
    m = modulus.bit_length() - 1
    result = _gf2_poly_mod(1, modulus)
    base = _gf2_poly_mod(2, modulus)
    while exp:
        if exp & 1:
            result = _gf2_poly_mulmod(result, base, modulus, m)
        base = _gf2_poly_mulmod(base, base, modulus, m)
        exp >>= 1
    return result


def is_irreducible(poly: int) -> bool:
    """Rabin irreducibility test for a binary polynomial (integer encoded)."""
    m = poly.bit_length() - 1
    if m <= 0:
        return False
    if m == 1:
        return True
    x_red = _gf2_poly_mod(2, poly)
    if _gf2_powmod_x(1 << m, poly) != x_red:
        return False
    for q in _prime_factors(m):
        t = _gf2_powmod_x(1 << (m // q), poly) ^ x_red
        if _gf2_poly_gcd(poly, t) != 1:
            return False
    return True


def _prime_factors(n: int) -> set[int]:
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


@lru_cache(maxsize=None)
def min_irreducible_poly(m: int) -> int:
    """The degree-m irreducible binary polynomial with least integer encoding."""
    if m < 1:
        raise InvalidInputError("field degree must be at least 1")
    for c in range(1 << m, 1 << (m + 1)):
        if is_irreducible(c):
            return c
    raise AssertionError("unreachable: irreducible polynomials exist for every m")


# ---------------------------------------------------------------------------
# the sample space


@dataclass(frozen=True)
class KWiseSpace:
    """An s-bit-seeded sample space whose k-projections are exactly uniform.

    ``gen_matrix`` is an s x n uint8 matrix over GF(2); ``columns`` carries
    the same data as integer bitmasks (bit j = row j).
    """

    n: int
    k: int
    s: int
    gen_matrix: np.ndarray
    construction_tag: str
    modulus: int

    def __post_init__(self):
        g = np.asarray(self.gen_matrix, dtype=np.uint8).copy()
        g.setflags(write=False)
        object.__setattr__(self, "gen_matrix", g)

    @property
    def columns(self) -> tuple[int, ...]:
        g = self.gen_matrix
        return tuple(
            int(sum(int(g[j, i]) << j for j in range(self.s))) for i in range(self.n)
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "s": self.s,
            "construction": self.construction_tag,
            "modulus": self.modulus,
        }

    @staticmethod
    def from_json(obj: dict) -> "KWiseSpace":
        space = build_space(int(obj["n"]), int(obj["k"]))
        if space.s != int(obj["s"]) or space.construction_tag != obj["construction"]:
            raise InvalidInputError("space descriptor does not match construction")
        if space.modulus != int(obj.get("modulus", space.modulus)):
            raise InvalidInputError("space descriptor modulus mismatch")
        return space


def build_space(n: int, k: int) -> KWiseSpace:
    """Construct the explicit k-wise independent space on {-1,+1}^n.

    k = n falls back to the identity matrix (the full cube, s = n).  The
    independence level of the generic construction must be confirmed by
    ``verify_kwise`` for small parameters; the matrix itself is only the
    candidate.
    """
    if not 1 <= k <= n:
        raise InvalidInputError(f"need 1 <= k <= n, got k={k}, n={n}")
    if k == n:
        gen = np.eye(n, dtype=np.uint8)
        return KWiseSpace(
            n=n, k=k, s=n, gen_matrix=gen, construction_tag="identity", modulus=0
        )
    m = n.bit_length()  # ceil(log2(n+1)), exactly
    modulus = min_irreducible_poly(m)
    e = k // 2  # ceil((k-1)/2)
    with_ones = k % 2 == 1
    s = (1 if with_ones else 0) + e * m
    gen = np.zeros((s, n), dtype=np.uint8)
    for i in range(1, n + 1):
        row = 0
        if with_ones:
            gen[row, i - 1] = 1
            row += 1
        alpha = i
        alpha_sq = _gf2_poly_mulmod(alpha, alpha, modulus, m)
        power = alpha  # alpha^(2j-1) as j walks the odd exponents
        for _ in range(e):
            for b in range(m):
                gen[row + b, i - 1] = (power >> b) & 1
            row += m
            power = _gf2_poly_mulmod(power, alpha_sq, modulus, m)
    return KWiseSpace(
        n=n, k=k, s=s, gen_matrix=gen, construction_tag="bch", modulus=modulus
    )


def sample(space: KWiseSpace, seed) -> np.ndarray:
    """The cube point of one seed: x_i = (-1)^parity(seed AND column_i).

    ``seed`` is an integer in [0, 2^s) or a bit sequence of length s
    (bit j = row j of the generator matrix).
    """
    if isinstance(seed, (int, np.integer)):
        if not 0 <= seed < (1 << space.s):
            raise InvalidInputError(f"seed {seed} out of range for s={space.s}")
        bits = np.array([(int(seed) >> j) & 1 for j in range(space.s)], dtype=np.uint8)
    else:
        bits = np.asarray(seed, dtype=np.uint8)
        if bits.shape != (space.s,) or not np.all((bits == 0) | (bits == 1)):
            raise InvalidInputError(f"seed must be {space.s} bits")
    parity = (bits @ space.gen_matrix) & 1
    return (1 - 2 * parity.astype(np.int8)).astype(np.int8)


def _seed_bit_matrix(s: int, start: int, count: int) -> np.ndarray:
    seeds = np.arange(start, start + count, dtype=np.uint64)
    return ((seeds[:, None] >> np.arange(s, dtype=np.uint64)[None, :]) & 1).astype(
        np.uint8
    )


def enumerate_support(space: KWiseSpace, chunk: int = 1 << 16) -> Iterator[np.ndarray]:
    """Yield the support as (chunk, n) blocks of +-1 rows, in seed order.

    Each seed contributes one row; rows may repeat across seeds, and
    expectations over the space weight by seed multiplicity.
    """
    if space.s > SEED_ENUM_LIMIT:
        raise ResourceLimitError(
            f"s={space.s} exceeds the enumeration guard ({SEED_ENUM_LIMIT}); "
            "use streaming Monte Carlo over seeds instead"
        )
    total = 1 << space.s
    for start in range(0, total, chunk):
        count = min(chunk, total - start)
        bits = _seed_bit_matrix(space.s, start, count)
        parity = (bits @ space.gen_matrix) & 1
        yield (1 - 2 * parity.astype(np.int8)).astype(np.int8)


def support_array(space: KWiseSpace) -> np.ndarray:
    """The full 2^s x n support as one array (small s only)."""
    return np.concatenate(list(enumerate_support(space)), axis=0)


@dataclass(frozen=True)
class KWiseReport:
    """Verification outcome for an independence level.

    ``first_zero_cell`` is the strongest witness of failure: a projection
    pattern no seed produces.  Patterns are read with the first subset
    coordinate as the most significant bit, 0 encoding +1.
    """

    n: int
    k: int
    s: int
    passed: bool
    cells_checked: int
    expected_count: float
    first_bad_cell: tuple | None
    first_zero_cell: tuple | None
    conditional_checked: int
    conditional_passed: bool

    @property
    def witness(self) -> tuple | None:
        return self.first_zero_cell or self.first_bad_cell


def _pattern_tuple(index: int, k: int) -> tuple[int, ...]:
    """Cell index -> +-1 pattern, MSB first (0 bit encodes +1)."""
    return tuple(1 - 2 * ((index >> (k - 1 - j)) & 1) for j in range(k))


def verify_kwise(space: KWiseSpace, k: int, conditional_fixings: int = 16) -> KWiseReport:
    """Exhaustively recount every k-projection cell of the space.

    Passes iff every one of C(n,k) * 2^k cells is hit by exactly 2^(s-k)
    seeds.  Also spot-checks the conditional-independence property: fixing
    t < k coordinates to observed values must leave every (k-t)-projection
    of the filtered support uniform.
    """
    n, s = space.n, space.s
    if not 1 <= k <= n:
        raise InvalidInputError(f"need 1 <= k <= n, got k={k}")
    n_cells = math.comb(n, k) << k
    if n_cells > VERIFY_CELL_LIMIT or space.s > SEED_ENUM_LIMIT:
        raise ResourceLimitError(
            f"verification size {n_cells} cells / 2^{space.s} seeds exceeds guards"
        )
    pts = support_array(space)  # +-1 entries
    bits = ((1 - pts.astype(np.int32)) // 2).astype(np.int64)  # 0 for +1, 1 for -1
    total = 1 << s
    expected_num, expected_den = 1 << s, 1 << k  # expected count = 2^s / 2^k

    first_bad = None
    first_zero = None
    passed = True
    cells = 0
    weights = 1 << np.arange(k - 1, -1, -1, dtype=np.int64)  # MSB = first coord
    for subset in combinations(range(n), k):
        idx = bits[:, subset] @ weights
        counts = np.bincount(idx, minlength=1 << k)
        cells += 1 << k
        if expected_num % expected_den == 0 and np.all(
            counts == expected_num // expected_den
        ):
            continue
        passed = False
        subset_1based = tuple(c + 1 for c in subset)
        for cell in range(1 << k):
            cnt = int(counts[cell])
            if cnt * expected_den != expected_num:
                if first_bad is None:
                    first_bad = (subset_1based, _pattern_tuple(cell, k), cnt)
                if cnt == 0 and first_zero is None:
                    first_zero = (subset_1based, _pattern_tuple(cell, k), 0)
            if first_bad is not None and first_zero is not None:
                break

    # Fact-5.2-style conditional spot checks on the verified space
    cond_checked = 0
    cond_passed = True
    if passed and k >= 2:
        rng = np.random.default_rng(20240001)
        for _ in range(conditional_fixings):
            t = int(rng.integers(1, k))
            fix_coords = rng.choice(n, size=t, replace=False)
            pattern = rng.integers(0, 2, size=t)
            mask = np.all(bits[:, fix_coords] == pattern, axis=1)
            sub = bits[mask]
            if sub.shape[0] == 0:
                cond_passed = False
                break
            rest = [c for c in range(n) if c not in set(fix_coords.tolist())]
            kk = k - t
            wts = 1 << np.arange(kk - 1, -1, -1, dtype=np.int64)
            for subset in combinations(rest[: min(len(rest), kk + 3)], kk):
                idx = sub[:, subset] @ wts
                counts = np.bincount(idx, minlength=1 << kk)
                cond_checked += 1
                if not np.all(counts * (1 << kk) == sub.shape[0]):
                    cond_passed = False
                    break
            if not cond_passed:
                break

    return KWiseReport(
        n=n,
        k=k,
        s=s,
        passed=passed and cond_passed,
        cells_checked=cells,
        expected_count=expected_num / expected_den,
        first_bad_cell=first_bad,
        first_zero_cell=first_zero,
        conditional_checked=cond_checked,
        conditional_passed=cond_passed,
    )
