"""Run every suite on every model over several seeds and tabulate worst residuals."""
import argparse
import time

from moufang.report import MODEL_NAMES, SuiteConfig, run_suite


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    args = p.parse_args()

    ok = True
    for model in MODEL_NAMES:
        for seed in args.seeds:
            t0 = time.perf_counter()
            rep = run_suite(SuiteConfig(model, "all", args.samples, seed))
            worst = max(rep.records, key=lambda r: r.max_residual / r.tolerance if r.tolerance else 0.0)
            ok &= rep.passed
            print(f"{model:<10} seed={seed:<3} records={len(rep.records):3d}  "
                  f"{'PASS' if rep.passed else 'FAIL'}  closest to tolerance: {worst.name} "
                  f"{worst.max_residual:.2e}/{worst.tolerance:.0e}  [{time.perf_counter() - t0:.1f}s]")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
