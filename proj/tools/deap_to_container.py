#!/usr/bin/env python3
"""Convert DEAP preprocessed Python files (s01.dat .. s32.dat) into a recording container.

Each subject file is a pickle holding 'data' with shape 40 x 40 x 8064: trials
(already in video order), channels (the first 32 are EEG), and samples at 128 Hz
(the first 384 are the pre-trial baseline).

    python3 tools/deap_to_container.py /path/to/data_preprocessed_python out/deap
"""

import argparse
import json
import pickle
import sys
from pathlib import Path

import numpy as np

CHANNELS = [
    "Fp1", "AF3", "F3", "F7", "FC5", "FC1", "C3", "T7", "CP5", "CP1", "P3",
    "P7", "PO3", "O1", "Oz", "Pz", "Fp2", "AF4", "Fz", "F4", "F8", "FC6",
    "FC2", "Cz", "C4", "T8", "CP6", "CP2", "P4", "P8", "PO4", "O2",
]
BASELINE = 384


def write_f32(path, array):
    np.ascontiguousarray(array, dtype="<f4").tofile(path)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("source", type=Path, help="directory with sNN.dat files")
    ap.add_argument("out", type=Path, help="container directory to create")
    ap.add_argument("--subjects", type=int, nargs="*", help="subject numbers to include (default: all found)")
    args = ap.parse_args()

    files = sorted(args.source.glob("s[0-9][0-9].dat"))
    if args.subjects:
        wanted = set(args.subjects)
        files = [f for f in files if int(f.stem[1:]) in wanted]
    if not files:
        sys.exit(f"no sNN.dat files in {args.source}")

    args.out.mkdir(parents=True, exist_ok=True)
    trials = []
    for f in files:
        subject = int(f.stem[1:])
        with open(f, "rb") as fh:
            data = pickle.load(fh, encoding="latin1")["data"]
        if data.ndim != 3 or data.shape[1] < 32 or data.shape[2] <= BASELINE:
            sys.exit(f"{f}: unexpected array shape {data.shape}")
        for video in range(data.shape[0]):
            eeg = data[video, :32, :]
            stem = f"s{subject:02d}_v{video:02d}"
            write_f32(args.out / f"{stem}.f32", eeg[:, BASELINE:])
            write_f32(args.out / f"{stem}_baseline.f32", eeg[:, :BASELINE])
            trials.append({
                "subject": subject,
                "video_id": video,
                "file": f"{stem}.f32",
                "num_samples": int(eeg.shape[1] - BASELINE),
                "baseline_file": f"{stem}_baseline.f32",
            })
        print(f"{f.name}: {data.shape[0]} trials")

    manifest = {"sampling_rate_hz": 128, "channels": CHANNELS, "trials": trials}
    (args.out / "manifest.json").write_text(json.dumps(manifest, indent=1))
    print(f"wrote {len(trials)} trials to {args.out}")


if __name__ == "__main__":
    main()
