"""
End-to-end focal extension, both PSF methods
============================================

The full pipeline: score the blur per patch, pick a kernel per patch
(either a parametric Gaussian from the blur level, or a lookup-table kernel
estimated from a sharp/blurry training pair), Wiener-restore every patch,
stitch. The before/after blur maps quantify how far the in-focus band
extends: the lightly blurred transition band improves, while deeply
defocused areas are beyond recovery - matching what the restoration filter
can actually undo.
"""

import os

import numpy as np

from focusextend import (blur_map, cell_texture, deblur_image,
                         estimate_kernel_map, lut_build, ramp_profile,
                         save_image, synth_depth_blur)

out_dir = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(out_dir, exist_ok=True)

scene = cell_texture((512, 512), seed=3, scale=2.5)
profile = ramp_profile(scene.shape, 0.0, 8.0)
degraded = synth_depth_blur(scene, profile)
save_image(os.path.join(out_dir, "05_degraded.png"), degraded)

before = blur_map(degraded)
save_image(os.path.join(out_dir, "05_map_before.png"), before, bit_depth=16)

bands = {
    "sharp   (sigma < 0.5)": profile < 0.5,
    "shallow (1 <= sigma <= 3)": (profile >= 1.0) & (profile <= 3.0),
    "deep    (sigma > 6)": profile > 6.0,
}


def band_report(label, bm):
    print(f"  {label}")
    for name, mask in bands.items():
        print(f"    {name}: {bm[mask].mean():.3f}")


print("blur level by true-depth band:")
band_report("degraded input", before)

# Method 1: parametric Gaussian kernels from the blur level.
restored_g = deblur_image(degraded, method="gaussian")
save_image(os.path.join(out_dir, "05_restored_gaussian.png"), restored_g)
after_g = blur_map(restored_g)
save_image(os.path.join(out_dir, "05_map_gaussian.png"), after_g, bit_depth=16)
band_report("gaussian method", after_g)

# Method 2: lookup table built from this scene's own sharp/blurry pair.
km = estimate_kernel_map(scene, degraded, patch=64, stride=32, k=15)
lut = lut_build(km, bin_count=100, scale_note="demo ramp pair")
restored_l = deblur_image(degraded, method="lut", lut=lut)
save_image(os.path.join(out_dir, "05_restored_lut.png"), restored_l)
after_l = blur_map(restored_l)
save_image(os.path.join(out_dir, "05_map_lut.png"), after_l, bit_depth=16)
band_report("lookup-table method", after_l)

mid = bands["shallow (1 <= sigma <= 3)"]
for name, after in (("gaussian", after_g), ("lut", after_l)):
    gain = (before[mid].mean() - after[mid].mean()) / before[mid].mean()
    print(f"\n{name}: shallow-band blur reduced by {gain:.1%}")
print("\nwrote restored images and maps to", out_dir)
