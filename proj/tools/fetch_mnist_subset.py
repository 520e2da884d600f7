#!/usr/bin/env python3
# Copyright 2026 The roblip Authors
#
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
"""Writes a 5000-image MNIST sample as gzipped IDX files.

The sample is the one bundled with the mlxtend wheel (500 images per digit,
drawn from the original MNIST training set). It is split per class into
400 training and 100 held-out images, giving a 4000/1000 split.

Usage: fetch_mnist_subset.py OUT_DIR
"""

import gzip
import io
import pathlib
import struct
import subprocess
import sys
import tempfile
import zipfile

WHEEL_MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"


def read_rows(wheel_dir):
    wheels = sorted(pathlib.Path(wheel_dir).glob("mlxtend-*.whl"))
    if not wheels:
        raise SystemExit("mlxtend wheel download failed")
    with zipfile.ZipFile(wheels[-1]) as z:
        text = gzip.decompress(z.read(WHEEL_MEMBER)).decode()
    rows = []
    for line in text.strip().splitlines():
        fields = [int(float(v)) for v in line.split(",")]
        rows.append((fields[:-1], fields[-1]))
    return rows


def write_idx(path, dims, payload):
    magic = 0x0800 | len(dims)
    header = struct.pack(">I", magic) + b"".join(struct.pack(">I", d) for d in dims)
    with gzip.GzipFile(path, "wb", mtime=0) as f:
        f.write(header + bytes(payload))


def main():
    if len(sys.argv) != 2:
        raise SystemExit(__doc__)
    out = pathlib.Path(sys.argv[1])
    out.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps",
                        "-q", "-d", tmp, "mlxtend==0.24.0"], check=True)
        rows = read_rows(tmp)

    per_class = {}
    for pixels, label in rows:
        per_class.setdefault(label, []).append(pixels)
    train, test = [], []
    for label in sorted(per_class):
        images = per_class[label]
        train += [(p, label) for p in images[:400]]
        test += [(p, label) for p in images[400:]]

    for name, split in (("train", train), ("t10k", test)):
        pixels = [v for p, _ in split for v in p]
        write_idx(out / f"{name}-images-idx3-ubyte.gz", (len(split), 28, 28), pixels)
        write_idx(out / f"{name}-labels-idx1-ubyte.gz", (len(split),), [l for _, l in split])
    print(f"wrote {len(train)} train / {len(test)} test images to {out}")


if __name__ == "__main__":
    main()
