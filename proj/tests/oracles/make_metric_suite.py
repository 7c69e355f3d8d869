#!/usr/bin/env python3
# Copyright 2026 The qtfuse Authors.
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
"""Generates the 10-pair metric suite and freezes reference scores.

SSIM comes from scikit-image (Gaussian window, sigma 1.5, population
covariance, data range 255). FSIM comes from piq (luminance only, float64).
Both run on BT.601 luminance 0.299 R + 0.587 G + 0.114 B, unrounded.

Usage: make_metric_suite.py OUTPUT_DIR
Writes <name>_ref.png, <name>_dist.png and expected.csv.
"""

import io
import os
import sys

import numpy as np
import piq
import torch
from PIL import Image
from scipy import ndimage
from skimage import data
from skimage.metrics import structural_similarity


def crop(img, w, h, x=0, y=0):
    return np.ascontiguousarray(img[y:y + h, x:x + w])


def jpeg(img, quality):
    buf = io.BytesIO()
    Image.fromarray(img).save(buf, format="JPEG", quality=quality)
    return np.asarray(Image.open(io.BytesIO(buf.getvalue())))


def noise(img, sigma, rng):
    return np.clip(np.rint(img + rng.normal(0, sigma, img.shape)), 0, 255).astype(np.uint8)


def blur(img, sigma):
    axes = (sigma, sigma, 0) if img.ndim == 3 else sigma
    return np.clip(np.rint(ndimage.gaussian_filter(img.astype(np.float64), axes)), 0,
                   255).astype(np.uint8)


def contrast(img, k):
    return np.clip(np.rint(128 + k * (img.astype(np.float64) - 128)), 0, 255).astype(np.uint8)


def salt_pepper(img, frac, rng):
    out = img.copy()
    mask = rng.random(img.shape[:2])
    out[mask < frac / 2] = 0
    out[mask > 1 - frac / 2] = 255
    return out


def posterize(img, levels):
    step = 256 // levels
    return ((img // step) * step + step // 2).astype(np.uint8)


def luma(img):
    img = img.astype(np.float64)
    if img.ndim == 2:
        return img
    return 0.299 * img[..., 0] + 0.587 * img[..., 1] + 0.114 * img[..., 2]


def main():
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    out = sys.argv[1]
    os.makedirs(out, exist_ok=True)
    rng = np.random.default_rng(20261018)
    left, _, _ = data.stereo_motorcycle()
    suite = [
        ("camera_jpeg15", crop(data.camera(), 256, 256, 128, 64), lambda x: jpeg(x, 15)),
        ("astronaut_noise10", crop(data.astronaut(), 256, 256, 160, 40),
         lambda x: noise(x, 10, rng)),
        ("coins_blur15", crop(data.coins(), 300, 256, 40, 20), lambda x: blur(x, 1.5)),
        ("moon_contrast07", crop(data.moon(), 384, 384, 64, 64), lambda x: contrast(x, 0.7)),
        ("brick_saltpepper", crop(data.brick(), 256, 256), lambda x: salt_pepper(x, 0.02, rng)),
        ("grass_posterize16", crop(data.grass(), 320, 288, 100, 120),
         lambda x: posterize(x, 16)),
        ("chelsea_jpeg40", crop(data.chelsea(), 448, 300), lambda x: jpeg(x, 40)),
        ("coffee_noise4", crop(data.coffee(), 520, 400, 40, 0), lambda x: noise(x, 4, rng)),
        ("motorcycle_blur08", crop(left, 512, 416, 100, 40), lambda x: blur(x, 0.8)),
        ("retina_jpeg25", crop(data.retina(), 540, 540, 400, 400), lambda x: jpeg(x, 25)),
    ]
    rows = ["name,width,height,psnr,ssim,fsim"]
    for name, ref, distort in suite:
        dist = distort(ref)
        Image.fromarray(ref).save(os.path.join(out, name + "_ref.png"))
        Image.fromarray(dist).save(os.path.join(out, name + "_dist.png"))
        a, b = luma(ref), luma(dist)
        mse = np.mean((a - b) ** 2)
        psnr = 10 * np.log10(255.0 ** 2 / mse)
        ssim = structural_similarity(a, b, gaussian_weights=True, sigma=1.5,
                                     use_sample_covariance=False, data_range=255)
        t = lambda v: torch.from_numpy(v)[None, None]
        fsim = piq.fsim(t(a), t(b), data_range=255.0, chromatic=False).item()
        rows.append(f"{name},{a.shape[1]},{a.shape[0]},{psnr:.12f},{ssim:.12f},{fsim:.12f}")
        print(rows[-1])
    with open(os.path.join(out, "expected.csv"), "w") as f:
        f.write("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
