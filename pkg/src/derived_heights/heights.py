"""The two derived height pairings and their executable comparison.

Input datum: free R-modules X, Y of finite rank and an R-linear map
ell : X -> Y*, giving the four-term exact sequence

    0 -> S -> X --ell--> Y* -> T* -> 0,      S = ker ell, T = ker ell*,

with ell*(y)(x) = ell(x)(y).  Y* is modeled as the free module on the
dual basis, so ell is just an R-matrix and the complex differential is
its scalar expansion.

Two pairings S_0^(k) x T_0^(k) -> Q^k are implemented on deliberately
disjoint routes above the linear-algebra substrate:

  * the derivative-lift pairing: choose s~ with (g-1)^(k-1) s~ = s, then
    x_s with D^(k-1) x_s = s~ (and likewise y_t), and read off
    ell(x_s)(y_t) mod I^(k+1);
  * the Bockstein pairing: pull s back through the norm identification
    of H^1(C/IC) with S_0 and the page projection, apply the snake map
    of the k-th filtration step, and evaluate the resulting functional
    at a norm preimage of t.

Their agreement on every admissible (k, s, t) is the headline check;
each evaluation also re-derives itself from independently drawn lifts.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from . import linalg as la
from .complexes import TwoTermComplex
from .groupring import (
    GroupRingElt,
    RingCtx,
    convolve,
    derivative_op,
    graded_scalar,
    ideal_reducer,
)
from .modules import FpModule, free_module, r_matrix_expand, r_rows_from_scalar
from .rng import SplitMix64


class PairingError(ValueError):
    """Invalid pairing data; carries the offending position."""


class MembershipError(ValueError):
    """Argument outside the filtration piece it must belong to."""


class PairingValue:
    """Value in Q^k: a representative in I^k, compared modulo I^(k+1)."""

    __slots__ = ("ring", "k", "raw", "rep")

    def __init__(self, ring: RingCtx, k: int, raw: GroupRingElt):
        if not ideal_reducer(ring.p, ring.n, k).contains(raw.coeffs):
            raise AssertionError("pairing value escaped I^k")
        self.ring = ring
        self.k = k
        self.raw = raw
        self.rep = ring.elt(ideal_reducer(ring.p, ring.n, k + 1).reduce(raw.coeffs))

    def scalar(self) -> int:
        """Value under the normalization (gamma-1)^k -> 1 of Q^k."""
        return graded_scalar(self.ring, self.k, self.raw)

    def is_zero(self) -> bool:
        return self.rep.is_zero()

    def __eq__(self, other):
        return (
            isinstance(other, PairingValue)
            and self.k == other.k
            and self.rep == other.rep
        )

    def __repr__(self):
        return f"PairingValue(k={self.k}, rep={self.rep!r})"


def random_unit(ring: RingCtx, rng: SplitMix64) -> GroupRingElt:
    coeffs = np.array([rng.below(ring.m) for _ in range(ring.m)], dtype=np.int64)
    e = ring.elt(coeffs)
    if not e.is_unit():
        fix = coeffs.copy()
        fix[0] = (fix[0] + 1 - e.augmentation()) % ring.m
        e = ring.elt(fix)
    return e


def random_ell_matrix(ring: RingCtx, a: int, b: int, rng: SplitMix64):
    """Random R-matrix mixing units, (gamma-1)-multiples and norm lines.

    Plain uniform entries almost always force S = 0; the 40/40/20 mix
    makes higher filtration pieces appear with useful frequency.
    """
    gm1 = ring.gamma() - ring.one()
    rows = []
    for _ in range(a):
        row = []
        for _ in range(b):
            roll = rng.below(100)
            if roll < 40:
                row.append(random_unit(ring, rng))
            elif roll < 80:
                rnd = ring.elt(np.array([rng.below(ring.m) for _ in range(ring.m)]))
                row.append(gm1 * rnd)
            else:
                row.append(ring.scalar(rng.below(ring.m)) * ring.norm())
        rows.append(row)
    return rows


class PairingData:
    """The sequence 0 -> S -> X -> Y* -> T* -> 0 packaged for computation."""

    def __init__(self, ring: RingCtx, ell_rows: list[list[GroupRingElt]]):
        self.ring = ring
        self.ell = ell_rows
        self.a = len(ell_rows)
        self.b = len(ell_rows[0]) if self.a else 0
        if self.a == 0 or self.b == 0:
            raise PairingError("ell must have positive dimensions")
        self.x = free_module(ring, self.a)
        self.y = free_module(ring, self.b)
        self.d = r_matrix_expand(ring, ell_rows)
        self.d_t = r_matrix_expand(ring, [[ell_rows[i][j] for i in range(self.a)]
                                          for j in range(self.b)])
        p, n = ring.p, ring.n
        self.s_span = la.kernel(self.d, p, n)
        self.t_span = la.kernel(self.d_t, p, n)
        self._complex: Optional[TwoTermComplex] = None
        self._psi: dict[int, object] = {}
        self._pieces: dict[tuple[str, int], np.ndarray] = {}
        self._solvers: dict[tuple, la.Solver] = {}
        self._chains: dict[tuple, tuple] = {}

    def _solver(self, key: tuple, build) -> la.Solver:
        if key not in self._solvers:
            self._solvers[key] = la.Solver(build(), self.ring.p, self.ring.n)
        return self._solvers[key]

    @classmethod
    def from_scalar_matrix(cls, ring: RingCtx, mat: np.ndarray) -> "PairingData":
        """Build from the scalar expansion, checking it really is R-linear."""
        try:
            rows = r_rows_from_scalar(ring, mat)
        except ValueError as exc:
            raise PairingError(f"adjunction-failure: {exc}") from exc
        return cls(ring, rows)

    # -- structure ---------------------------------------------------------------

    def dual(self) -> "PairingData":
        """The dual datum 0 -> T -> Y -> X* -> S* -> 0 (transposed ell)."""
        rows = [[self.ell[i][j] for i in range(self.a)] for j in range(self.b)]
        return PairingData(self.ring, rows)

    def complex(self) -> TwoTermComplex:
        if self._complex is None:
            self._complex = TwoTermComplex(self.x, self.y, self.d)
        return self._complex

    def s_module(self) -> FpModule:
        return self.x.submodule(self.s_span)

    def t_module(self) -> FpModule:
        return self.y.submodule(self.t_span)

    def piece_span(self, side: str, k: int) -> np.ndarray:
        """Numerator span of S_0^(k) (side 's') or T_0^(k) (side 't')."""
        return self._piece(side, k)[0]

    def _piece(self, side: str, k: int):
        key = (side, k)
        if key not in self._pieces:
            mod = self.s_module() if side == "s" else self.t_module()
            span = mod.filtration_piece(k).num
            self._pieces[key] = (span, la.CosetReducer(span, self.ring.p, self.ring.n))
        return self._pieces[key]

    def eval_bilinear(self, xv: np.ndarray, yv: np.ndarray) -> GroupRingElt:
        """ell(x)(y) in R: push x through ell, then pair with y."""
        w = (np.asarray(xv, dtype=np.int64) @ self.d) % self.ring.m
        return self.eval_functional(w, yv)

    def eval_functional(self, wv: np.ndarray, yv: np.ndarray) -> GroupRingElt:
        """w(y) for w in Y* (dual-basis coordinates): sum_j w_j y_j."""
        ring = self.ring
        m = ring.m
        wm = np.asarray(wv, dtype=np.int64).reshape(self.b, m)
        ym = np.asarray(yv, dtype=np.int64).reshape(self.b, m)
        total = np.zeros(m, dtype=np.int64)
        for j in range(self.b):
            if wm[j].any() and ym[j].any():
                total = (total + convolve(wm[j], ym[j], m)) % m
        return ring.elt(total)

    # -- validation ----------------------------------------------------------------

    def validate(self) -> None:
        """Certify exactness of the sequence and its dual.

        The primal sequence is exact by construction (S and T* are
        derived); the content is the dual sequence, equivalent to the
        annihilator of S being exactly the image of ell*, plus the order
        bookkeeping for surjectivity onto S*.
        """
        ring = self.ring
        p, n, m = ring.p, ring.n, ring.m
        ann = self._annihilator_of(self.s_span, self.a)
        im_dual = la.howell_form(self.d_t, p, n)
        if not la.spans_equal(ann, im_dual, p, n):
            raise PairingError("not-exact: image of ell* differs from ann(S) at X*")
        s_order = la.span_size(self.s_span, p, n)
        xstar_order = m ** (self.a * m)
        ann_order = la.span_size(ann, p, n)
        if xstar_order // ann_order != s_order:
            raise PairingError("not-exact: X* does not surject onto S*")
        # adjunction on basis pairs: ell*(e_j)(e_i) = ell(e_i)(e_j)
        for i in range(self.a):
            for j in range(self.b):
                xv = np.zeros(self.a * m, dtype=np.int64)
                xv[i * m] = 1
                yv = np.zeros(self.b * m, dtype=np.int64)
                yv[j * m] = 1
                lhs = self.eval_bilinear(xv, yv)
                rhs = self.dual().eval_bilinear(yv, xv)
                if lhs != rhs:
                    raise PairingError(f"adjunction-failure at basis pair ({i}, {j})")

    def _annihilator_of(self, span: np.ndarray, rank: int) -> np.ndarray:
        """Functionals in the dual-basis model vanishing on a span in R^rank."""
        ring = self.ring
        p, n, m = ring.p, ring.n, ring.m
        if span.shape[0] == 0:
            return la.identity_span(rank * m)
        from .groupring import regular_rep

        blocks = []
        for srow in span:
            cols = np.vstack([regular_rep(ring.elt(srow[i * m:(i + 1) * m]))
                              for i in range(rank)])
            blocks.append(cols)
        return la.kernel(np.hstack(blocks), p, n)

    # -- the derivative-lift pairing -------------------------------------------------

    def bd_pairing(self, k: int, s: np.ndarray, t: np.ndarray,
                   rng: Optional[SplitMix64] = None, gen_exp: int = 1,
                   audit: bool = True) -> PairingValue:
        """ell(x_s)(y_t) mod I^(k+1) via derivative-operator lifts.

        Every lift is drawn twice with independent randomness; the two
        computations must give the same class in Q^k (audit=True).
        """
        ring = self.ring
        self._check_membership(k, s, t)
        rng = rng or SplitMix64(0)
        xs = self._lift_chains("s", k, gen_exp, s, rng)
        ys = self._lift_chains("t", k, gen_exp, t, rng)
        out = PairingValue(ring, k, self.eval_bilinear(xs[0], ys[0]))
        if audit:
            again = PairingValue(ring, k, self.eval_bilinear(xs[1], ys[1]))
            if again != out:
                raise AssertionError("derivative-lift pairing depended on lift choices")
        return out

    def _lift_chains(self, side: str, k: int, gen_exp: int,
                     target: np.ndarray, rng: SplitMix64) -> tuple:
        """Two independently drawn lift chains for one argument.

        Cached per element: the chains depend on (side, k, generator,
        element) only, so pair enumeration costs one chain per element
        rather than one per pair.
        """
        target = np.asarray(target, dtype=np.int64)
        key = ("chain", side, k, gen_exp, target.tobytes())
        if key in self._chains:
            return self._chains[key]
        pair = (self._one_chain(side, k, gen_exp, target, rng),
                self._one_chain(side, k, gen_exp, target, rng))
        self._chains[key] = pair
        return pair

    def _one_chain(self, side: str, k: int, gen_exp: int,
                   target: np.ndarray, rng: SplitMix64) -> np.ndarray:
        """Random s~ in ker with (g-1)^(k-1) s~ = target, then x with D x = s~."""
        ring = self.ring
        m = ring.m
        ker_span = self.s_span if side == "s" else self.t_span
        free = self.x if side == "s" else self.y
        g = ring.gamma(gen_exp)
        tilde_solver = self._solver(
            ("tilde", side, k, gen_exp),
            lambda: (ker_span @ free.scale_matrix((g - ring.one()) ** (k - 1))) % m,
        )
        coeffs = tilde_solver.random_solution(target, rng)
        if coeffs is None:
            raise AssertionError("lift-not-found: element not divisible inside the kernel")
        tilde = (coeffs @ ker_span) % m
        lift_solver = self._solver(
            ("lift", side, k, gen_exp),
            lambda: free.scale_matrix(derivative_op(ring, k - 1, gen_exp)),
        )
        x = lift_solver.random_solution(tilde, rng)
        if x is None:
            raise AssertionError("lift-not-found: derivative equation unsolvable")
        return x

    # -- the Bockstein pairing ---------------------------------------------------------

    def boc_pairing(self, k: int, s: np.ndarray, t: np.ndarray,
                    rng: Optional[SplitMix64] = None,
                    audit: bool = True) -> PairingValue:
        """Snake-map pairing through the spectral-sequence machinery.

        Finds a representative a of a class in H^1(C/I^k C) whose norm
        is s, applies the k-th generalized Bockstein, and evaluates the
        resulting functional at a norm preimage of t under the
        identification of H^2(I^k C/I^{k+1} C) with Hom(T_0, Q^k).
        The audit recomputes from an independent representative, a
        boundary-perturbed functional and a different norm preimage.
        """
        ring = self.ring
        self._check_membership(k, s, t)
        rng = rng or SplitMix64(0)
        ws = self._boc_functionals(k, s, rng)
        ys = self._norm_preimages(k, t, rng)
        out = PairingValue(ring, k, self.eval_functional(ws[0], ys[0]))
        if audit:
            again = PairingValue(ring, k, self.eval_functional(ws[1], ys[1]))
            if again != out:
                raise AssertionError("Bockstein pairing depended on representative choices")
        return out

    def _boc_functionals(self, k: int, s: np.ndarray, rng: SplitMix64) -> tuple:
        """Two snake-map outputs over s, the second boundary-perturbed."""
        s = np.asarray(s, dtype=np.int64)
        key = ("boc", k, s.tobytes())
        if key in self._chains:
            return self._chains[key]
        pair = (self._boc_functional(k, s, rng, perturb=False),
                self._boc_functional(k, s, rng, perturb=True))
        self._chains[key] = pair
        return pair

    def _boc_functional(self, k: int, s: np.ndarray,
                        rng: SplitMix64, perturb: bool) -> np.ndarray:
        ring = self.ring
        m = ring.m
        psi = self._psi_map(k)
        am, bm = self.a * m, self.b * m

        def build_big():
            # unknown (a, w): a d = w (I^k C^2 basis)  and  a N = s
            ik2 = self.complex().ideal_span2(k)
            rows = ik2.shape[0]
            big = np.zeros((am + rows, bm + am), dtype=np.int64)
            big[:am, :bm] = self.d
            big[:am, bm:] = self.x.scale_matrix(ring.norm())
            if rows:
                big[am:, :bm] = (-ik2) % m
            return big

        rhs = np.zeros(bm + am, dtype=np.int64)
        rhs[bm:] = s
        z = self._solver(("boc-system", k), build_big).random_solution(rhs, rng)
        if z is None:
            raise AssertionError("lift-not-found: no page representative above s")
        a = z[:am]
        if not psi.src.contains_elt(a):
            raise AssertionError("page representative escaped H^1(C/I^k C)")
        w = psi.apply(a)
        if perturb:
            # adding anything from the target denominator must not move
            # the evaluation: certifies the boundary-killing of the
            # identification with Hom(T_0, Q^k)
            den = psi.tgt.den
            if den.shape[0]:
                extra = den[rng.below(den.shape[0])]
                w = (w + rng.below(m) * extra) % m
        return w

    def _norm_preimages(self, k: int, t: np.ndarray, rng: SplitMix64) -> tuple:
        t = np.asarray(t, dtype=np.int64)
        key = ("norm-pre", t.tobytes())
        if key in self._chains:
            return self._chains[key]
        solver = self._solver(("norm", "y"), lambda: self.y.scale_matrix(self.ring.norm()))
        ys = (solver.random_solution(t, rng), solver.random_solution(t, rng))
        if ys[0] is None or ys[1] is None:
            raise AssertionError("lift-not-found: t has no norm preimage in Y")
        self._chains[key] = ys
        return ys

    def _psi_map(self, k: int):
        if k not in self._psi:
            self._psi[k] = self.complex().generalized_bockstein(k)
        return self._psi[k]

    def _check_membership(self, k: int, s: np.ndarray, t: np.ndarray) -> None:
        ring = self.ring
        if not 1 <= k <= ring.p - 1:
            raise MembershipError("pairings exist for 1 <= k <= p-1")
        if not self._piece("s", k)[1].contains(np.asarray(s, dtype=np.int64)):
            raise MembershipError("s is not in S_0^(k)")
        if not self._piece("t", k)[1].contains(np.asarray(t, dtype=np.int64)):
            raise MembershipError("t is not in T_0^(k)")

    # -- comparison driver ---------------------------------------------------------------

    def compare(self, kmax: int, rng: Optional[SplitMix64] = None,
                max_card: int = 10 ** 4, audit: bool = True) -> dict:
        """Evaluate both pairings on each admissible (k, s, t).

        Enumerates all pairs when |S_0^(k)| * |T_0^(k)| stays below
        max_card, generator pairs otherwise.  Each record carries the
        two values, the equality flag, the dual-sequence symmetry flag
        and a generator-substitution flag.
        """
        ring = self.ring
        rng = rng or SplitMix64(0)
        dual = self.dual()
        units = [u for u in range(2, ring.m) if u % ring.p]
        records = []
        ok = True
        for k in range(1, min(kmax, ring.p - 1) + 1):
            s_span = self.piece_span("s", k)
            t_span = self.piece_span("t", k)
            s_size = la.span_size(s_span, ring.p, ring.n)
            t_size = la.span_size(t_span, ring.p, ring.n)
            if s_size == 1 or t_size == 1:
                continue
            if s_size * t_size <= max_card:
                s_list = [v for v in la.span_elements(s_span, ring.p, ring.n) if v.any()]
                t_list = [v for v in la.span_elements(t_span, ring.p, ring.n) if v.any()]
            else:
                s_list = [r for r in s_span]
                t_list = [r for r in t_span]
            u = units[rng.below(len(units))] if units else 1
            for s in s_list:
                for t in t_list:
                    bd = self.bd_pairing(k, s, t, rng=rng, audit=audit)
                    boc = self.boc_pairing(k, s, t, rng=rng, audit=audit)
                    sym = dual.bd_pairing(k, t, s, rng=rng, audit=False)
                    gamma_ok = True
                    if units:
                        alt = self.bd_pairing(k, s, t, rng=rng, gen_exp=u, audit=False)
                        gamma_ok = alt == bd
                    rec = {
                        "k": k,
                        "s": [int(v) for v in s],
                        "t": [int(v) for v in t],
                        "bd": [int(c) for c in bd.rep.coeffs],
                        "boc": [int(c) for c in boc.rep.coeffs],
                        "scalar": bd.scalar(),
                        "equal": bd == boc,
                        "symmetric": sym == bd,
                        "gamma_independent": gamma_ok,
                    }
                    ok = ok and rec["equal"] and rec["symmetric"] and gamma_ok
                    records.append(rec)
        return {"pass": ok, "records": records}


def random_pairing_data(ring: RingCtx, rng: SplitMix64, max_rank: int = 3) -> PairingData:
    a = rng.below(max_rank) + 1
    b = rng.below(max_rank) + 1
    return PairingData(ring, random_ell_matrix(ring, a, b, rng))
