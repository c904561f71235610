"""
Picking a symbol codec from measured statistics
===============================================

Three fields with very different textures go through the same analysis:
sampled madogram profiles, the code histogram's entropy bracket, and the
resulting codec decision. Streams expected to Huffman-code at or below
1.09 bits/symbol are repeat-dominated, so run-length coding wins there.
"""

import numpy as np

from lzebc import Field, QuantConfig, analyze, compress, parse_header

rng = np.random.default_rng(7)

fields = {
    # Constant: every delta is zero, one giant run.
    "constant": np.full((96, 96), 3.25),
    # Smooth ramp plus gentle waves: deltas hug zero but do vary.
    "smooth": np.add.outer(np.linspace(0, 5, 96), np.sin(np.linspace(0, 12, 96))),
    # White noise: neighbors are unrelated, deltas spread wide.
    "noise": rng.uniform(0.0, 1.0, (96, 96)),
}

# "smooth" below is the binary madogram score: the probability that two
# nearby samples quantize to the SAME integer at this bound. A drifting
# ramp is binary-rough even though its deltas stay small and cheap to
# code, which is why entropy, not smoothness, makes the final call.
print(f"{'field':10s} {'smooth':>7s} {'H':>6s} {'<b>':>6s}  decision")
for name, data in fields.items():
    field = Field.from_array(data)
    cfg = QuantConfig(1e-3 * max(field.value_range, 1.0))
    record = analyze(field, cfg)
    e = record.entropy
    print(f"{name:10s} {record.smoothness:7.3f} {e.entropy:6.2f} "
          f"{e.b_exact:6.2f}  {record.decision.chosen.name}")

    # The full pipeline lands on the same choice.
    archive = compress(field, eb=cfg.eb_abs, eb_mode="abs")
    assert parse_header(archive).workflow is record.decision.chosen

# The madogram behind those smoothness numbers: mean variance of sampled
# pairs at each separation. Binary kind scores pairs 0/1 (equal or not).
field = Field.from_array(fields["smooth"])
record = analyze(field, QuantConfig(1e-3 * field.value_range), dmax=32)
with open("/tmp/smooth_madogram.csv", "w") as fh:
    fh.write(record.to_csv())
print("\nmadogram profile written to /tmp/smooth_madogram.csv")

for stage, rep in record.reports:
    if rep.kind != "binary":
        continue
    head = ", ".join(f"v({d})={v:.3f}" for d, v in
                     zip(rep.distances[:4], rep.variance[:4]))
    print(f"  {stage:10s} roughness={rep.roughness:.3f}  {head}")

# Decision bases: "exact" builds the codebook and uses the true average
# bit-length; "estimate" takes the midpoint of the entropy-plus-redundancy
# bracket, trading a little accuracy for skipping tree construction.
field = Field.from_array(fields["constant"])
for mode in ("exact", "estimate"):
    record = analyze(field, QuantConfig(0.01), mode=mode)
    d = record.decision
    print(f"mode={mode:9s} basis={d.basis:7s} b={d.b_estimate:.3f} "
          f"threshold={d.threshold} -> {d.chosen.name}")
