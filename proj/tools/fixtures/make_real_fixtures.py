#!/usr/bin/env python3
"""Builds the bundled real-photo fixtures under tests/fixtures/real.

Each fixture is a self-pair sample directory: model.png, model_keypoints.json,
garment_mask.png, model_parse.png, upper_mask.png and target_mask.png, all at
192x256. Annotations are hand-placed polygons and keypoints, written below in
the coordinates of a 3x enlarged (576x768) view of the cropped photo.
"""

import argparse
import json
import os
from pathlib import Path

from PIL import Image, ImageDraw

WIDTH, HEIGHT = 192, 256
SCALE = 3.0

SKIMAGE_DATA = "/usr/local/lib/python3.10/dist-packages/skimage/data"
MPL_DATA = "/usr/local/lib/python3.10/dist-packages/matplotlib/mpl-data/sample_data"

JOINTS = [
    "nose", "neck",
    "right_shoulder", "right_elbow", "right_wrist",
    "left_shoulder", "left_elbow", "left_wrist",
    "right_hip", "right_knee", "right_ankle",
    "left_hip", "left_knee", "left_ankle",
    "right_eye", "left_eye", "right_ear", "left_ear",
]
MIRROR_JOINT = {
    2: 5, 3: 6, 4: 7, 5: 2, 6: 3, 7: 4,
    8: 11, 9: 12, 10: 13, 11: 8, 12: 9, 13: 10,
    14: 15, 15: 14, 16: 17, 17: 16,
}

TORSO, LEFT_ARM, RIGHT_ARM, OTHER = 1, 2, 3, 4

SUBJECTS = {
    "astronaut": {
        "source": (SKIMAGE_DATA, "astronaut.png"),
        "crop": (64, 0, 448, 512),
        "garment": [
            [(0, 335), (40, 318), (78, 300), (100, 350), (140, 400), (200, 432),
             (270, 440), (330, 420), (358, 380), (362, 320), (400, 355),
             (425, 390), (440, 450), (450, 520), (445, 545), (400, 560),
             (360, 600), (330, 660), (320, 768), (0, 768)],
        ],
        "right_arm": [(0, 330), (50, 320), (80, 420), (95, 560), (110, 768), (0, 768)],
        "left_arm": [(365, 330), (420, 380), (445, 460), (455, 545), (400, 560),
                     (380, 470), (370, 400)],
        "other": [
            [(130, 80), (200, 20), (320, 30), (360, 120), (330, 220), (300, 270),
             (170, 270), (140, 200)],
            [(75, 250), (150, 225), (300, 230), (365, 300), (360, 400), (300, 440),
             (200, 440), (100, 360)],
        ],
        "upper_extra": [
            [(75, 250), (150, 225), (300, 230), (365, 300), (360, 400), (300, 440),
             (200, 440), (100, 360)],
            [(90, 720), (170, 720), (170, 768), (90, 768)],
        ],
        "keypoints": {
            "nose": (240, 200, 0.9), "neck": (220, 330, 0.9),
            "right_shoulder": (45, 370, 0.8), "right_elbow": (40, 600, 0.7),
            "right_wrist": (120, 745, 0.7),
            "left_shoulder": (390, 370, 0.8), "left_elbow": (440, 510, 0.7),
            "left_wrist": (370, 620, 0.5),
            "right_hip": (120, 820, 0.4), "left_hip": (340, 820, 0.4),
            "right_eye": (205, 150, 0.9), "left_eye": (285, 150, 0.9),
            "right_ear": (150, 165, 0.6), "left_ear": (340, 165, 0.6),
        },
    },
    "camera": {
        "source": (SKIMAGE_DATA, "camera.png"),
        "crop": (64, 0, 448, 512),
        "garment": [
            [(0, 225), (60, 200), (135, 165), (150, 240), (180, 300), (160, 330),
             (150, 360), (190, 390), (230, 360), (250, 330), (300, 320),
             (330, 360), (355, 390), (355, 410), (340, 460), (280, 470),
             (200, 480), (150, 540), (130, 600), (130, 768), (0, 768)],
        ],
        "right_arm": [(40, 280), (120, 260), (160, 330), (200, 390), (190, 440),
                      (120, 470), (40, 470), (20, 380)],
        "left_arm": [(230, 350), (300, 320), (340, 360), (360, 410), (340, 460),
                     (270, 465), (215, 440)],
        "other": [
            [(140, 130), (200, 95), (290, 120), (310, 190), (280, 290), (200, 290),
             (150, 240)],
        ],
        "upper_extra": [
            [(150, 230), (200, 290), (260, 300), (280, 340), (200, 330)],
            [(300, 260), (400, 250), (400, 320), (330, 330)],
        ],
        "keypoints": {
            "nose": (285, 240, 0.9), "neck": (160, 270, 0.8),
            "right_shoulder": (80, 280, 0.8), "right_elbow": (70, 430, 0.7),
            "right_wrist": (200, 345, 0.7),
            "left_shoulder": (190, 300, 0.5), "left_elbow": (330, 430, 0.6),
            "left_wrist": (370, 300, 0.6),
            "right_hip": (60, 640, 0.5), "left_hip": (100, 650, 0.4),
            "right_eye": (265, 205, 0.8), "right_ear": (190, 215, 0.7),
        },
    },
    "hopper": {
        "source": (MPL_DATA, "grace_hopper.jpg"),
        "crop": (31, 0, 481, 600),
        "garment": [
            [(0, 480), (90, 460), (205, 415), (225, 500), (260, 580), (285, 650),
             (300, 680), (330, 640), (340, 570), (370, 510), (380, 400),
             (470, 450), (576, 480), (576, 768), (0, 768)],
        ],
        "right_arm": [(0, 480), (70, 465), (50, 600), (40, 768), (0, 768)],
        "left_arm": [(500, 460), (576, 480), (576, 768), (530, 768), (520, 600)],
        "other": [
            [(160, 60), (420, 60), (440, 300), (380, 420), (300, 470), (210, 420),
             (160, 300)],
        ],
        "upper_extra": [
            [(205, 415), (380, 400), (370, 520), (300, 680), (225, 500)],
        ],
        "keypoints": {
            "nose": (295, 330, 0.9), "neck": (295, 450, 0.9),
            "right_shoulder": (60, 510, 0.8), "right_elbow": (-20, 760, 0.4),
            "right_wrist": (20, 900, 0.3),
            "left_shoulder": (530, 520, 0.8), "left_elbow": (600, 760, 0.4),
            "left_wrist": (560, 900, 0.3),
            "right_hip": (130, 1000, 0.3), "left_hip": (460, 1000, 0.3),
            "right_eye": (240, 260, 0.9), "left_eye": (350, 260, 0.9),
            "right_ear": (170, 300, 0.7), "left_ear": (420, 300, 0.7),
        },
    },
}


def scaled(polygon):
    return [(x / SCALE, y / SCALE) for x, y in polygon]


def fill(polygons, value=255, base=None):
    img = base if base is not None else Image.new("L", (WIDTH, HEIGHT), 0)
    draw = ImageDraw.Draw(img)
    for poly in polygons:
        draw.polygon(scaled(poly), fill=value)
    return img


def load_photo(subject, source_root):
    directory, name = subject["source"]
    path = Path(source_root or directory) / name
    photo = Image.open(path).convert("RGB").crop(subject["crop"])
    return photo.resize((WIDTH, HEIGHT), Image.LANCZOS)


def build(subject, source_root):
    image = load_photo(subject, source_root)
    garment = fill(subject["garment"])
    upper = fill(subject["upper_extra"], base=garment.copy())

    parse = Image.new("L", (WIDTH, HEIGHT), 0)
    fill(subject["other"], OTHER, base=parse)
    body = Image.new("L", (WIDTH, HEIGHT), 0)
    body.paste(TORSO, mask=upper)
    parse.paste(body, mask=upper)
    arms = Image.new("L", (WIDTH, HEIGHT), 0)
    fill([subject["right_arm"]], RIGHT_ARM, base=arms)
    fill([subject["left_arm"]], LEFT_ARM, base=arms)
    arm_in_upper = Image.eval(arms, lambda v: 255 if v else 0)
    arm_in_upper = Image.composite(arm_in_upper, Image.new("L", arms.size, 0), upper)
    parse.paste(arms, mask=arm_in_upper)

    keypoints = []
    for name in JOINTS:
        x, y, c = subject["keypoints"].get(name, (0.0, 0.0, 0.0))
        keypoints.append([round(x / SCALE, 3), round(y / SCALE, 3), c])
    return image, keypoints, garment, parse, upper


def mirror(image, keypoints, garment, parse, upper):
    flip = Image.FLIP_LEFT_RIGHT
    swapped = parse.transpose(flip).point(
        lambda v: {LEFT_ARM: RIGHT_ARM, RIGHT_ARM: LEFT_ARM}.get(v, v))
    mirrored = [None] * len(keypoints)
    for i, (x, y, c) in enumerate(keypoints):
        j = MIRROR_JOINT.get(i, i)
        mirrored[j] = [round(WIDTH - 1 - x, 3) if c > 0 else 0.0, y, c]
    return (image.transpose(flip), mirrored, garment.transpose(flip), swapped,
            upper.transpose(flip))


def write(out_dir, image, keypoints, garment, parse, upper):
    out_dir.mkdir(parents=True, exist_ok=True)
    image.save(out_dir / "model.png")
    garment.save(out_dir / "garment_mask.png")
    garment.save(out_dir / "target_mask.png")
    parse.save(out_dir / "model_parse.png")
    upper.save(out_dir / "upper_mask.png")
    with open(out_dir / "model_keypoints.json", "w") as f:
        json.dump({"keypoints": keypoints}, f, indent=1)
        f.write("\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    default_out = Path(__file__).resolve().parents[2] / "tests" / "fixtures" / "real"
    parser.add_argument("--out", type=Path, default=default_out)
    parser.add_argument("--source-root", default=None,
                        help="directory holding all source photos")
    args = parser.parse_args()

    for name, subject in SUBJECTS.items():
        sample = build(subject, args.source_root)
        write(args.out / name, *sample)
        write(args.out / f"{name}_mirror", *mirror(*sample))
        print("wrote", os.fspath(args.out / name))


if __name__ == "__main__":
    main()
