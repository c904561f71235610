"""
A complete command-line session
===============================

The `lzebc` executable works on raw binary field files: little-endian
scalars, x varying fastest. This script stages a 3D field on disk, then
walks the four subcommands the way a shell user would.
"""

import subprocess
import tempfile
from pathlib import Path

import numpy as np

work = Path(tempfile.mkdtemp(prefix="lzebc_demo_"))

# A 32x48x64 pressure-like blob, saved as raw float32.
z, y, x = np.mgrid[0:32, 0:48, 0:64].astype(np.float64)
blob = np.exp(-((x - 32) ** 2 + (y - 24) ** 2 + (z - 16) ** 2) / 400.0)
raw = work / "blob.f32"
blob.astype("<f4").tofile(raw)
print(f"wrote {raw} ({raw.stat().st_size} bytes)")


def sh(*args):
    cmd = ["lzebc", *args]
    print(f"\n$ {' '.join(cmd)}")
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.stdout:
        print(proc.stdout, end="")
    if proc.stderr:
        print(proc.stderr, end="")
    return proc


# Dims are given x,y,z; the scalar type must match the file.
sh("compress", "-d", "64,48,32", "-t", "f32", "-e", "rel:1e-4",
   str(raw), str(work / "blob.lz"))

sh("decompress", str(work / "blob.lz"), str(work / "back.f32"))

# stats re-derives the quality line from the two raw files + archive size.
sh("stats", "-d", "64,48,32", "-t", "f32",
   str(raw), str(work / "back.f32"), str(work / "blob.lz"))

# analyze writes the madogram/entropy profile as CSV.
sh("analyze", "-d", "64,48,32", "-t", "f32", "-e", "rel:1e-4", "--dmax", "16",
   str(raw), str(work / "profile.csv"))
head = (work / "profile.csv").read_text().splitlines()
print("profile.csv, first rows:")
for line in head[:4]:
    print(f"  {line}")
print("profile.csv, summary tail:")
for line in head[-7:]:
    print(f"  {line}")

# Errors come back as exit codes: 1 usage, 2 bad data, 3 corrupt archive.
bad = sh("compress", "-d", "64,48,99", "-t", "f32", str(raw), str(work / "x.lz"))
print(f"exit code {bad.returncode} (dims disagree with the file size)")

(work / "torn.lz").write_bytes((work / "blob.lz").read_bytes()[:100])
torn = sh("decompress", str(work / "torn.lz"), str(work / "y.f32"))
print(f"exit code {torn.returncode} (truncated archive)")

# Verify the bound end to end, reading back what decompress wrote.
restored = np.fromfile(work / "back.f32", "<f4").astype(np.float64)
eb_abs = 1e-4 * (blob.max() - blob.min())
print(f"\nmax abs error {np.abs(restored - blob.ravel()).max():.3g} "
      f"<= bound {eb_abs:.3g}")
