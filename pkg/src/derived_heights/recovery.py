"""Structure recovery of H^2 over Z localized at p from tau invariants.

For an integer two-term complex [Z^a -> Z^b] viewed over the discrete
valuation ring Z_(p) with maximal ideal (p), the stable corner of the
filtration spectral sequence has

    tau_k = dim_{F_p} of  p^k Z^b / (p^{k+1} Z^b + p^k Z^b cap im d),

computed below by exact lattice arithmetic (intersection, then F_p rank)
without ever diagonalizing.  The profile is non-increasing and
eventually constant; the stable value is the free rank of coker d and
the successive drops are the multiplicities of Z/p^i summands.  A Smith
normal form over Z provides the independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import intlinalg as il


@dataclass(frozen=True)
class IntComplex:
    """Prime p and the integer matrix d of [Z^a -> Z^b] (rows map in)."""

    p: int
    d: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.p < 2 or any(self.p % q == 0 for q in range(2, self.p)):
            raise ValueError("p must be prime")
        if not self.d or not self.d[0]:
            raise ValueError("d must be a nonempty matrix")
        if any(len(r) != len(self.d[0]) for r in self.d):
            raise ValueError("d must be rectangular")

    @classmethod
    def make(cls, p: int, rows) -> "IntComplex":
        return cls(p, tuple(tuple(int(x) for x in r) for r in rows))

    @property
    def cols(self) -> int:
        return len(self.d[0])


@dataclass
class TauProfile:
    """tau_0, tau_1, ... through a certified stabilization point."""

    p: int
    taus: list[int]
    k0: int = field(init=False)

    def __post_init__(self):
        taus = self.taus
        if any(a < b for a, b in zip(taus, taus[1:])):
            raise ValueError("tau profile must be non-increasing")
        k0 = len(taus) - 1
        while k0 > 1 and taus[k0 - 1] == taus[-1]:
            k0 -= 1
        self.k0 = max(k0, 1)


def tau_value(cx: IntComplex, k: int) -> int:
    """Single tau_k by exact lattice arithmetic (no Smith form)."""
    p, b = cx.p, cx.cols
    pk = p ** k
    scaled = [[pk if i == j else 0 for j in range(b)] for i in range(b)]
    inter = il.int_span_intersect(scaled, [list(r) for r in cx.d])
    reduced = [[(x // pk) % p for x in row] for row in inter]
    return b - il.fp_rank(reduced, p)


def tau_sequence(cx: IntComplex, kmax: int | None = None) -> TauProfile:
    """The tau profile through a certified stabilization point.

    Defaults kmax to 1 + the longest entry bit-length and doubles while
    the tail is not certified; certification is either a zero tail
    (monotonicity pins everything after) or exceeding the p-valuation
    bound on elementary divisors.
    """
    p = cx.p
    entries = [abs(x) for row in cx.d for x in row]
    if kmax is None:
        kmax = 1 + max(entries).bit_length()
    vbound = il.valuation_bound([list(r) for r in cx.d], p)
    while True:
        taus = [tau_value(cx, k) for k in range(kmax + 1)]
        if taus[-1] == 0 or kmax >= vbound:
            return TauProfile(p, taus)
        kmax *= 2


def recover_structure(profile: TauProfile) -> tuple[int, dict[int, int]]:
    """(free rank, {i: multiplicity of Z/p^i}) from a stabilized profile."""
    taus = profile.taus
    free = taus[profile.k0]
    mult = {}
    for i in range(1, profile.k0 + 1):
        f = taus[i - 1] - taus[i]
        if f < 0:
            raise ValueError("non-monotone profile; upstream computation broken")
        if f:
            mult[i] = f
    return free, mult


def snf_oracle(cx: IntComplex) -> tuple[int, dict[int, int]]:
    """Ground truth via Smith form: p-parts of the elementary divisors."""
    divisors, free = il.smith_form_int([list(r) for r in cx.d])
    mult: dict[int, int] = {}
    for d in divisors:
        v = 0
        while d % cx.p == 0:
            d //= cx.p
            v += 1
        if v:
            mult[v] = mult.get(v, 0) + 1
    return free, mult


def verify_recovery(cx: IntComplex) -> dict:
    """Run both routes and report the comparison."""
    profile = tau_sequence(cx)
    recovered = recover_structure(profile)
    oracle = snf_oracle(cx)
    return {
        "taus": profile.taus,
        "k0": profile.k0,
        "recovered": {"free": recovered[0],
                      "torsion": {str(k): v for k, v in recovered[1].items()}},
        "oracle": {"free": oracle[0],
                   "torsion": {str(k): v for k, v in oracle[1].items()}},
        "pass": recovered == oracle,
    }
