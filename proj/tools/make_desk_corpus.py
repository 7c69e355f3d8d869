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
"""Writes the desk corpus: public-domain sample photos bundled with
scikit-image, scikit-learn and matplotlib, saved as 8-bit PNG.

Usage: make_desk_corpus.py OUTPUT_DIR
"""

import os
import sys

import numpy as np
from PIL import Image


def skimage_images():
    from skimage import data
    names = [
        "astronaut", "brick", "camera", "cell", "chelsea", "clock", "coffee",
        "coins", "grass", "gravel", "hubble_deep_field", "immunohistochemistry",
        "moon", "retina", "rocket",
    ]
    for name in names:
        yield name, getattr(data, name)()
    left, right, _ = data.stereo_motorcycle()
    yield "motorcycle_left", left
    yield "motorcycle_right", right


def sklearn_images():
    from sklearn.datasets import load_sample_images
    ds = load_sample_images()
    for fname, img in zip(ds.filenames, ds.images):
        yield os.path.splitext(os.path.basename(fname))[0], img


def matplotlib_images():
    import matplotlib.cbook as cbook
    with cbook.get_sample_data("grace_hopper.jpg") as f:
        yield "grace_hopper", np.asarray(Image.open(f).convert("RGB"))


def to_uint8(img):
    img = np.asarray(img)
    if img.dtype == np.uint8:
        return img
    if img.dtype == np.bool_:
        return img.astype(np.uint8) * 255
    img = img.astype(np.float64)
    if img.max() <= 1.0:
        img = img * 255.0
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def main():
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    out = sys.argv[1]
    os.makedirs(out, exist_ok=True)
    count = 0
    for source in (skimage_images, sklearn_images, matplotlib_images):
        for name, img in source():
            img = to_uint8(img)
            if img.ndim == 3 and img.shape[2] == 4:
                img = img[:, :, :3]
            if min(img.shape[:2]) < 64:
                continue
            Image.fromarray(img).save(os.path.join(out, name + ".png"))
            count += 1
    print(f"wrote {count} images to {out}")


if __name__ == "__main__":
    main()
