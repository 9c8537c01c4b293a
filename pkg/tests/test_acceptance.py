"""Acceptance suite: one pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are echoed in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
Per-draw records are written to ``acceptance_report.json`` in the repo root.
"""

import json
import sys
import time
from pathlib import Path

import pytest

from qtwist import chain as ch
from qtwist import rmatrix as rm
from qtwist.identities import CATALOGUES, EXACT_IDS, verify_identity
from qtwist.linalg import spectrum_report
from qtwist.report import RationalSampler, fmt_rational
from qtwist.tensor import E21, kron

# tolerances: exact arithmetic everywhere except float spectra
FLOAT_TOL = 1e-9
ORDER = 6
EXACT_N = range(1, 6)
YBE_TRIALS = 20
COCYCLE_POINTS = 10
COMMUTE_SITES = range(2, 7)
COMMUTE_DRAWS = 5
HAM_SITES = (2, 3, 4)
ISO_SITES = range(2, 7)
UNDEFORMED_SITES = range(2, 6)
JORDAN_SITES = (3, 4)
JORDAN_DRAWS = 10

REPORT_PATH = Path(__file__).resolve().parent.parent / "acceptance_report.json"
LINES = []
RECORDS = {}


def _seed_for(*parts):
    # stable across runs, unlike hash()
    return sum((i + 1) * 1009 * ord(c) for i, c in enumerate("/".join(map(str, parts)))) % 100003


def _fmt_params(spec):
    return {k: fmt_rational(v) for k, v in spec.binding().items()}


def _first_failure(checks):
    return next((c for c in checks if not c.ok), None)


# -- criteria --------------------------------------------------------------------------

def criterion_1():
    checks = []
    for ident in CATALOGUES["all"]:
        if ident in EXACT_IDS:
            if ident in ("Q12", "Q12W"):
                checks.append((ident, verify_identity(ident, order=ORDER)))
            checks.extend((f"{ident}[n={n}]", verify_identity(ident, order=ORDER, n=n))
                          for n in EXACT_N)
        else:
            checks.append((ident, verify_identity(ident, order=ORDER)))
    bad = [(label, r.detail) for label, r in checks if not r.ok]
    record = {label: r.ok for label, r in checks}
    if bad:
        return False, f"{len(bad)} of {len(checks)} failed, first {bad[0][0]}: {bad[0][1]}", record
    return True, f"{len(checks)} identity checks exact at order {ORDER}", record


def criterion_2():
    c = rm.verify_twist()
    return c.ok, c.detail, {}


def criterion_3():
    checks = [rm.verify_rzz(f) for f in rm.FAMILIES]
    bad = _first_failure(checks)
    if bad:
        return False, f"{bad.id}: {bad.detail}", {}
    return True, "R^F(s,s) = P12 for " + ", ".join(rm.FAMILIES), {}


def criterion_4():
    checks = [rm.verify_YBE("trig", "symbolic")]
    checks += [rm.verify_YBE(f, "sampled", trials=YBE_TRIALS, seed=_seed_for("ybe", f))
               for f in rm.FAMILIES]

    def corrupted(fam, s1, s2):
        m = rm.build_RF(fam, s1, s2).copy()
        m.rows[1][2] = m.rows[1][2] + 1
        return m

    controls = [
        rm.verify_YBE("trig", "sampled", trials=5, seed=1, builder=corrupted),
        rm.verify_YBE("yang", "sampled", trials=5, seed=1, builder=rm.sigma_z_yang_variant),
    ]
    record = {c.id: c.ok for c in checks}
    record["control-corrupted"] = controls[0].ok
    record["control-sigma-z-variant"] = controls[1].ok
    bad = _first_failure(checks)
    if bad:
        return False, f"{bad.id}: {bad.detail}", record
    if any(c.ok for c in controls):
        return False, "a negative control passed YBE", record
    return True, (f"symbolic trig plus {YBE_TRIALS} sampled points per family with zero residual; "
                  "both negative controls fail"), record


def criterion_5():
    sym = rm.verify_cocycle_rep()
    sam = rm.verify_cocycle_sampled(COCYCLE_POINTS, seed=_seed_for("cocycle"))
    lam, _ = rm.normalization_factor()
    record = {"symbolic": sym.ok, "sampled": sam.ok, "normalization": str(lam)}
    ok = sym.ok and sam.ok
    detail = f"symbolic: {sym.status}; {COCYCLE_POINTS} seeded points: {sam.status}; lambda = {lam}"
    if not ok:
        detail += f" ({(sym if not sym.ok else sam).detail})"
    return ok, detail, record


def criterion_6():
    checks = [rm.verify_CYBE(k) for k in rm.CLASSICAL_KINDS]
    fwd, bwd = rm.gauge_conjugations()
    record = {c.id: c.ok for c in checks}
    record["gauge"] = {"forward": fwd, "backward": bwd}
    bad = _first_failure(checks)
    if bad:
        return False, f"{bad.id}: {bad.detail}", record
    if fwd == bwd:
        return False, f"gauge directions forward={fwd} backward={bwd}", record
    which = "r_ab -> r~_ab" if fwd else "r~_ab -> r_ab"
    return True, f"CYBE holds for {len(checks)} kinds; gauge holds in one direction ({which})", record


def criterion_7():
    record = []
    for fam in rm.FAMILIES:
        for N in COMMUTE_SITES:
            sampler = RationalSampler(_seed_for("commute", fam, N))
            for _ in range(COMMUTE_DRAWS):
                spec = ch.random_spec(fam, N, sampler)
                z1, z2 = ch.random_spectral(spec, sampler, 2)
                c = ch.verify_transfer_commute(spec, z1, z2)
                record.append({"family": fam, "N": N, "params": _fmt_params(spec),
                               "z1": fmt_rational(z1), "z2": fmt_rational(z2), "ok": c.ok})
                if not c.ok:
                    return False, f"{fam} N={N}: {c.detail}", record
    return True, f"[t(z'),t(z'')] = 0 in {len(record)} seeded cases (N=2..6, 3 families)", record


def criterion_8():
    record = []
    per_site = {}
    for fam in rm.FAMILIES:
        sampler = RationalSampler(_seed_for("hamiltonian", fam))
        for draw in range(3):
            base = ch.random_spec(fam, 2, sampler)
            values = []
            for N in HAM_SITES:
                c = ch.compare_hamiltonians(base.with_sites(N))
                values.append(c.data.get("c"))
                record.append({"family": fam, "draw": draw, "N": N, "params": _fmt_params(base),
                               "c": fmt_rational(c.data.get("c")), "ok": c.ok})
                if not c.ok:
                    return False, f"{fam} N={N}: {c.detail}", record
            ratios = {v / N for v, N in zip(values, HAM_SITES)}
            if len(ratios) != 1:
                return False, f"{fam}: c/N varies with N: {sorted(ratios)}", record
            per_site.setdefault(fam, []).append(ratios.pop())
    shown = "; ".join(f"{f} c/N = {fmt_rational(v[0])}" for f, v in per_site.items())
    return True, f"H_transfer - H_closed = c I for N=2,3,4, c/N fixed per draw ({shown}, first draws)", record


def criterion_9():
    record = []
    worst = dense = 0.0
    for fam in rm.FAMILIES:
        sampler = RationalSampler(_seed_for("isospectral", fam))
        for N in ISO_SITES:
            spec = ch.random_spec(fam, N, sampler)
            c = ch.verify_isospectral(spec, tol=FLOAT_TOL)
            worst = max(worst, c.data["worst"])
            dense = max(dense, c.data["dense"])
            record.append({"family": fam, "N": N, "params": _fmt_params(spec), "exact": c.data["exact"],
                           "float_dev": c.data["worst"], "dense_dev": c.data["dense"], "ok": c.ok})
            if not c.ok:
                return False, f"{fam} N={N}: {c.detail}", record
    return True, (f"charpolys equal exactly in {len(record)} cases (N=2..6); "
                  f"charge-block float spectra within {worst:.2g} (tol {FLOAT_TOL:g}); "
                  f"dense solver off by up to {dense:.2g} near Jordan blocks"), record


def _nilpotent_control():
    op = kron(E21, E21)
    H = ch.embed_local(op, (0, 1), 3)
    return spectrum_report(H)


def criterion_10():
    record = {"undeformed": [], "deformed": [], "control": None}
    for fam in rm.FAMILIES:
        sampler = RationalSampler(_seed_for("undeformed", fam))
        for N in UNDEFORMED_SITES:
            spec = ch.random_spec(fam, N, sampler).undeformed()
            rep = ch.jordan_report(spec)
            record["undeformed"].append({"family": fam, "N": N, "params": _fmt_params(spec),
                                         "squarefree": rep.squarefree})
            if not rep.squarefree:
                return False, f"undeformed {fam} N={N} has a non-squarefree minimal polynomial", record
    non_diag = 0
    for fam in rm.FAMILIES:
        sampler = RationalSampler(_seed_for("jordan", fam))
        for k in range(JORDAN_DRAWS):
            N = JORDAN_SITES[k % len(JORDAN_SITES)]
            spec = ch.random_spec(fam, N, sampler)
            c = ch.jordan_check(spec, seed=k)
            rep = c.data["report"]
            non_diag += not rep.squarefree
            record["deformed"].append({
                "family": fam, "N": N, "params": _fmt_params(spec),
                "diagonalizable": rep.squarefree, "verdict": c.detail,
                "jordan_eigenvalues": [fmt_rational(x) for x in rep.jordan_eigenvalues],
            })
            if not c.ok:
                return False, f"inconsistent verdict for {fam} N={N}: {c.detail}", record
    ctrl = _nilpotent_control()
    record["control"] = {"diagonalizable": ctrl.squarefree}
    if ctrl.squarefree:
        return False, "nilpotent control reported diagonalizable", record
    total = len(record["deformed"])
    if non_diag == total:
        finding = "every deformed draw is non-diagonalizable, consistent with Jordan blocks"
    elif non_diag:
        finding = f"{non_diag}/{total} deformed draws non-diagonalizable"
    else:
        finding = "no deformed draw shows a Jordan block"
    return True, (f"undeformed N=2..5 squarefree; {total} deformed draws recorded, {finding}; "
                  "nilpotent control detected"), record


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def run_criterion(k):
    t0 = time.perf_counter()
    ok, detail, record = CRITERIA[k - 1]()
    elapsed = time.perf_counter() - t0
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f}s) {detail}"
    print(line)
    LINES.append(line)
    RECORDS[str(k)] = {"ok": ok, "detail": detail, "seconds": round(elapsed, 3), "record": record}
    _write_report()
    return ok, detail


def _write_report():
    existing = {}
    if REPORT_PATH.exists():
        try:
            existing = json.loads(REPORT_PATH.read_text())
        except ValueError:
            existing = {}
    existing.update(RECORDS)
    ordered = {k: existing[k] for k in sorted(existing, key=int)}
    REPORT_PATH.write_text(json.dumps(ordered, indent=2, default=str) + "\n")


@pytest.mark.parametrize("k", range(1, 11))
def test_criterion(k):
    ok, detail = run_criterion(k)
    assert ok, detail


if __name__ == "__main__":
    results = [run_criterion(k)[0] for k in range(1, 11)]
    sys.exit(0 if all(results) else 1)
