"""Fine-tune the generator on a canonical corpus and write a checkpoint.

Usage:
  python -m actforge_neural.train_gen --corpus corpus.json --epochs 3 --out gen.pt
"""

from __future__ import annotations

import argparse

from .generator import GenHyperparams, train_generator


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="train the actforge generator")
    parser.add_argument("--corpus", required=True, help="canonical corpus JSON with gold acts")
    parser.add_argument("--epochs", type=int, default=3)
    parser.add_argument("--out", required=True, help="checkpoint path")
    parser.add_argument("--lr", type=float, default=1e-3)
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    hp = GenHyperparams(lr=args.lr, batch_size=args.batch_size, seed=args.seed)
    _, history = train_generator(args.corpus, args.epochs, hp, checkpoint_path=args.out)
    for log in history:
        train = "-" if log.train_loss != log.train_loss else f"{log.train_loss:.4f}"
        print(f"epoch {log.epoch}: train {train}  eval {log.eval_loss:.4f}")
    print(f"checkpoint written to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
