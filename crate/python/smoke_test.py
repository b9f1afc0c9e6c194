"""Smoke test for the `aesthetics` extension module.

Build it first and put it next to this script:

    cargo build -p aesthetics-python --release
    cp target/release/libaesthetics.so python/aesthetics.so
    python3 python/smoke_test.py
"""

import io
import math
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import aesthetics  # noqa: E402


def check(cond, what):
    if not cond:
        raise SystemExit(f"FAIL: {what}")
    print(f"ok   {what}")


def main():
    ids = [m[0] for m in aesthetics.list_metrics()]
    check(len(ids) == 46 and "slope_amplitude" in ids, "metric catalog lists 46 ids")
    check(set(aesthetics.default_metrics()) <= set(ids), "defaults are catalog ids")

    w, h = 64, 48
    data = bytes((x * 4 + y) % 256 for y in range(h) for x in range(w) for _ in range(3))
    img = aesthetics.Image.from_rgb(w, h, data)
    check((img.width, img.height) == (w, h), "image dimensions")
    check(img.rgb_bytes() == data, "pixel round trip")

    values = aesthetics.compute(img, ["image_size", "aspect_ratio", "mirror_symmetry"])
    check(values["image_size"] == 112 and abs(values["aspect_ratio"] - 4 / 3) < 1e-12, "geometry metrics")
    check(0 <= values["mirror_symmetry"] <= 100, "mirror symmetry in percent")

    flipped = aesthetics.compute(img.flip_horizontal(), ["mirror_symmetry"])["mirror_symmetry"]
    check(abs(flipped - values["mirror_symmetry"]) < 1e-9, "mirror symmetry ignores a horizontal flip")

    try:
        aesthetics.compute(img, ["no_such_metric"])
        check(False, "unknown metric rejected")
    except KeyError:
        check(True, "unknown metric rejected")

    tiny = aesthetics.Image.from_rgb(4, 4, bytes(48))
    check(math.isnan(aesthetics.compute(tiny, ["homogeneity"])["homogeneity"]), "failed metric is NaN")

    surface = aesthetics.Image.random_phase(256, 2.0, 7)
    fit = aesthetics.fourier_slope(surface, "amplitude", 256)
    check(abs(fit["slope"] - 2.0) < 0.1, f"random-phase slope {fit['slope']:.3f} near 2")
    d2, d3 = aesthetics.fractal_dimensions(surface)
    check(1.0 <= d2 <= 2.0 and 2.0 <= d3 <= 3.0, f"fractal dimensions {d2:.3f} / {d3:.3f}")

    phog = aesthetics.phog_measures(surface)
    check(0.0 <= phog["self_similarity"] <= 1.0, "phog self-similarity in [0, 1]")
    edges = aesthetics.edge_measures(surface)
    check(0.0 <= edges["eoe_first_order"] <= math.log2(24), "first-order entropy bounded")
    bal = aesthetics.balance_measures(surface)
    check(all(0.0 <= v <= 100.0 for v in bal.values()), "balance measures in percent")

    bank = aesthetics.Weights.bundled()
    check(bank.filters == 96, "bundled bank has 96 filters")
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "bank.atb")
        bank.save(path)
        check(aesthetics.Weights.load(path).to_bytes() == bank.to_bytes(), "weight file round trip")
    broken = bytearray(bank.to_bytes())
    broken[100] ^= 1
    try:
        aesthetics.Weights.from_bytes(bytes(broken))
        check(False, "corrupt weights rejected")
    except ValueError:
        check(True, "corrupt weights rejected")

    cnn = aesthetics.cnn_measures(surface, bank)
    check(0.0 <= cnn["self_similarity"] <= 1.0, "conv1 self-similarity in [0, 1]")
    try:
        aesthetics.compute(surface, ["cnn_sparseness"])
        check(False, "conv1 metrics need weights")
    except ValueError:
        check(True, "conv1 metrics need weights")

    try:
        from PIL import Image as PilImage
    except ImportError:
        print("skip PNG decode (Pillow not installed)")
    else:
        buf = io.BytesIO()
        PilImage.new("RGB", (3, 2), (255, 0, 0)).save(buf, format="PNG")
        red = aesthetics.Image.decode(buf.getvalue())
        check(red.rgb_bytes() == bytes([255, 0, 0]) * 6, "PNG decode")

    print("all smoke checks passed")


if __name__ == "__main__":
    main()
