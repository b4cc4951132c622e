#!/usr/bin/env python3
# Copyright 2026 The pairfair Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Convert the UCI Communities and Crime file into a pairfair CSV.

Usage: prepare_crime.py communities.data out.csv

Rows keep every predictive column without missing values. The label is 1
when ViolentCrimesPerPop exceeds its 70th percentile, the protected
attribute is racepctblack, and the attribute also stays a feature.
"""

import csv
import sys

NON_PREDICTIVE = 5  # state, county, community, communityname, fold
RACE_PCT_BLACK = 7
NUM_COLUMNS = 128


def main(argv):
    if len(argv) != 3:
        sys.exit(__doc__.strip().splitlines()[2])
    with open(argv[1], newline="") as f:
        rows = [r for r in csv.reader(f) if r]
    for lineno, r in enumerate(rows, 1):
        if len(r) != NUM_COLUMNS:
            sys.exit(f"line {lineno}: expected {NUM_COLUMNS} fields, got {len(r)}")
    keep = [c for c in range(NON_PREDICTIVE, NUM_COLUMNS - 1)
            if all(r[c] != "?" for r in rows)]
    if RACE_PCT_BLACK not in keep:
        sys.exit("racepctblack has missing values")
    target = sorted(float(r[-1]) for r in rows)
    threshold = target[int(0.7 * (len(target) - 1))]
    with open(argv[2], "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["label", "attribute"] + [f"f{c}" for c in keep])
        for r in rows:
            label = 1 if float(r[-1]) > threshold else 0
            w.writerow([label, r[RACE_PCT_BLACK]] + [r[c] for c in keep])


if __name__ == "__main__":
    main(sys.argv)
