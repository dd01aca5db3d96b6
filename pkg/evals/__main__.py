"""
Reproduces the headline claims end to end and prints one line per claim.

Some claims are expected not to pass as stated (the 1.71678 rounding check,
the limit at 10^12 and the c = 5/2 threshold, which lies far beyond any scan);
they are printed like the rest so the summary shows exactly what was found.
"""

import argparse
import time

from dotenv import load_dotenv

from evals.reproduce import Reproduction, score
from PrimeBound.utils.logging import setup_logging

if __name__ == "__main__":
    load_dotenv()
    parser = argparse.ArgumentParser(description="Reproduce the prime inequality claims.")
    parser.add_argument("--scale", type=int, default=1, help="Divide the large scan ranges by this factor (default: 1)")
    parser.add_argument("--workers", type=int, default=1, help="Scan worker processes (default: 1)")
    parser.add_argument("--debug", action="store_true", help="Log progress to standard error")
    args = parser.parse_args()

    setup_logging(debug=args.debug)
    start = time.time()
    results = Reproduction(scale=args.scale, workers=args.workers).run()
    for i, result in enumerate(results):
        mark = "PASS" if result.passed else "FAIL"
        print(f"Claim {i+1}/{len(results)} | {mark} | {result.name}: {result.detail}")
    print(f"\nReproduction complete. Score: {score(results):.3f} | Elapsed: {time.time() - start:.1f}s")
