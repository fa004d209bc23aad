import torch

import pytest

from actforge_neural.generator import (
    GenHyperparams,
    TinyGenerator,
    load_corpus_examples,
    train_generator,
)


def test_smoke_train_eval_loss_strictly_decreases(synth_corpus_path):
    # 100 synthetic examples, 3 epochs
    _, history = train_generator(synth_corpus_path, epochs=3, hp=GenHyperparams(seed=0))
    losses = [log.eval_loss for log in history]
    assert len(losses) == 4
    for before, after in zip(losses, losses[1:]):
        assert after < before, losses


def test_zero_epochs_checkpoint_equals_initialization(synth_corpus_path, tmp_path):
    hp = GenHyperparams(seed=11)
    trained, history = train_generator(
        synth_corpus_path, epochs=0, hp=hp, checkpoint_path=tmp_path / "init.pt"
    )
    assert len(history) == 1

    examples = load_corpus_examples(synth_corpus_path)
    from actforge_neural.vocab import WordVocab

    vocab = WordVocab.build([s for s, _ in examples] + [t for _, t in examples])
    fresh = TinyGenerator.build(vocab, hp)
    for key, tensor in fresh.model.state_dict().items():
        assert torch.equal(tensor, trained.model.state_dict()[key]), key

    reloaded = TinyGenerator.load(tmp_path / "init.pt")
    for key, tensor in trained.model.state_dict().items():
        assert torch.equal(tensor, reloaded.model.state_dict()[key]), key


def test_corpus_without_user_act_rejected(tmp_path):
    import json

    bad = {
        "dialogues": [
            {
                "id": "d",
                "turns": [
                    {
                        "turn_id": 0,
                        "system_utterance": "",
                        "user_utterance": "hello",
                        "belief_state": {},
                    }
                ],
            }
        ]
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad), encoding="utf-8")
    with pytest.raises(ValueError, match="user_act"):
        train_generator(path, epochs=1)


def test_beam_width_bounds_candidates(synth_corpus_path):
    generator, _ = train_generator(synth_corpus_path, epochs=0, hp=GenHyperparams(seed=2))
    act = [{"act_type": "inform", "slot": "hotel-area", "value": "north", "refer": None}]
    for beam in (1, 3):
        candidates = generator.generate([], "which area?", act, beam)
        assert 1 <= len(candidates) <= beam
        assert all(isinstance(c, str) and c for c in candidates)


def test_conditioning_serialization():
    from actforge_neural.condition import build_source, linearize_act

    act = [
        {"act_type": "confirm", "slot": "restaurant-name", "value": "pho bistro", "refer": None},
        {"act_type": "inform", "slot": "taxi-arrive", "value": "17:26", "refer": "restaurant-time"},
    ]
    line = linearize_act(act)
    assert line == "confirm(restaurant-name=pho bistro);inform(taxi-arrive=17:26, refer=restaurant-time)"
    source = build_source([("hi", "hello")], "anything else?", act)
    assert source.startswith("hi | hello | anything else? | act: confirm(")
