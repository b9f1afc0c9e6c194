"""Write the first convolution layer of a trained AlexNet as an ATB1 weight file.

The library feeds raw 0-255 RGB values minus per-channel means into the filters,
so the usual torchvision input normalization ((x / 255 - mean) / std) is folded
into the kernels: w' = w / (255 * std) and mean' = 255 * mean.

    python3 export_alexnet_conv1.py alexnet.pth conv1.atb
    python3 export_alexnet_conv1.py --torchvision conv1.atb   # downloads weights
"""

import argparse
import struct
import zlib

import numpy as np

MEAN = np.array([0.485, 0.456, 0.406])
STD = np.array([0.229, 0.224, 0.225])


def load_conv1(source):
    import torch

    if source is None:
        from torchvision.models import AlexNet_Weights, alexnet

        state = alexnet(weights=AlexNet_Weights.IMAGENET1K_V1).state_dict()
    else:
        state = torch.load(source, map_location="cpu")
        state = state.get("state_dict", state)
    return state["features.0.weight"].numpy(), state["features.0.bias"].numpy()


def encode(weight, bias):
    if weight.shape != (96, 3, 11, 11) or bias.shape != (96,):
        raise SystemExit(f"unexpected conv1 shape {weight.shape}")
    folded = weight / (255.0 * STD)[None, :, None, None]
    body = struct.pack("<4I", 96, 3, 11, 11)
    body += (255.0 * MEAN).astype("<f4").tobytes()
    body += folded.astype("<f4").tobytes()
    body += bias.astype("<f4").tobytes()
    return b"ATB1" + body + struct.pack("<I", zlib.crc32(body))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("state_dict", nargs="?", help="saved AlexNet state dict (.pth)")
    ap.add_argument("output")
    ap.add_argument("--torchvision", action="store_true", help="fetch the torchvision weights instead")
    args = ap.parse_args()
    if not args.torchvision and args.state_dict is None:
        ap.error("give a state dict or --torchvision")
    weight, bias = load_conv1(None if args.torchvision else args.state_dict)
    with open(args.output, "wb") as f:
        f.write(encode(weight, bias))


if __name__ == "__main__":
    main()
