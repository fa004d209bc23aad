"""Train the slot classifier on a canonical corpus and write a checkpoint.

Usage:
  python -m actforge_neural.train_filter --corpus corpus.json --dict slots.json \
      --epochs 3 --out filter.pt
"""

from __future__ import annotations

import argparse

from .classifier import FilterHyperparams, train_filter


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="train the actforge slot classifier")
    parser.add_argument("--corpus", required=True)
    parser.add_argument("--dict", required=True)
    parser.add_argument("--epochs", type=int, default=3)
    parser.add_argument("--out", required=True)
    parser.add_argument("--lr", type=float, default=2e-3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    hp = FilterHyperparams(lr=args.lr, seed=args.seed)
    _, losses = train_filter(args.corpus, args.dict, args.epochs, hp, checkpoint_path=args.out)
    for epoch, loss in enumerate(losses, start=1):
        print(f"epoch {epoch}: loss {loss:.4f}")
    print(f"checkpoint written to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
