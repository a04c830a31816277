"""The two derived height pairings and their coincidence.

From an R-linear ell : X -> Y* between free modules we get the exact
sequence 0 -> S -> X -> Y* -> T* -> 0 and, for each k < p, a pairing of
the filtration pieces S_0^(k) x T_0^(k) into Q^k.  The derivative-lift
route and the Bockstein route are implemented independently; this
script reproduces the two hand-checkable values and then lets the two
routes race on a random instance.
"""

from derived_heights.groupring import RingCtx
from derived_heights.heights import PairingData, random_pairing_data
from derived_heights.rng import SplitMix64

ring = RingCtx(3, 1)
nvec = ring.norm().coeffs

print("== ell = multiplication by g-1: the k = 1 pairing ==")
data = PairingData(ring, [[ring.gamma() - ring.one()]])
data.validate()
bd = data.bd_pairing(1, nvec, nvec)
boc = data.boc_pairing(1, nvec, nvec)
print("<N, N>_1 via derivative lifts:", bd.rep, " scalar:", bd.scalar())
print("<N, N>_1 via the snake map:  ", boc.rep, " scalar:", boc.scalar())
print("equal:", bd == boc)

print("\n== ell = multiplication by N: the k = 2 pairing ==")
data2 = PairingData(ring, [[ring.norm()]])
bd2 = data2.bd_pairing(2, nvec, nvec)
boc2 = data2.boc_pairing(2, nvec, nvec)
print("<N, N>_2 both ways:", bd2.rep, "/", boc2.rep, " scalar:", bd2.scalar())

print("\n== a random instance at (3,2), every admissible (k, s, t) ==")
rng = SplitMix64(4)
inst = random_pairing_data(RingCtx(3, 2), rng, max_rank=2)
inst.validate()
report = inst.compare(kmax=2, rng=rng)
agree = sum(r["equal"] for r in report["records"])
print(f"{len(report['records'])} evaluations, {agree} agreements,"
      f" symmetric: {all(r['symmetric'] for r in report['records'])},"
      f" generator-independent: {all(r['gamma_independent'] for r in report['records'])}")
print("overall:", "PASS" if report["pass"] else "FAIL")
