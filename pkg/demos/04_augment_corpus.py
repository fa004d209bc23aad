"""End-to-end augmentation of the bundled corpus, with stats and distribution."""

from actforge import AugConfig, bundled_coref_list, bundled_dictionary, bundled_mini_corpus
from actforge.augment import AugDeps, augment_corpus
from actforge.genbridge import PhraseLexicon
from actforge.metrics import slot_distribution

svdict = bundled_dictionary()
coref = bundled_coref_list()
lexicon = PhraseLexicon.default_for(svdict, coref)
corpus = bundled_mini_corpus()

deps = AugDeps(svdict=svdict, coref=coref, lexicon=lexicon)
records, stats = augment_corpus(corpus, deps, AugConfig(seed=2024), workers=4)

print(f"attempted {stats.turns_attempted}, succeeded {stats.turns_succeeded}, "
      f"skipped {stats.turns_skipped} (success rate {stats.success_rate:.2f})")
print("act item counts:", stats.act_type_counts)
print()

for record in records[:4]:
    print(f"{record.dialogue_id} turn {record.turn_id} "
          f"(generator={record.generator}, attempts={record.attempts})")
    for item in record.augmented_act:
        refer = f" refers {item.refer}" if item.refer else ""
        print(f"   {item.act_type}: {item.slot}={item.value}{refer}")
    print(f"   -> {record.augmented_utterance}")
print()

print("slot distribution of the augmented records:")
print(slot_distribution(records, svdict, coref).format_table())
print()
print("slot distribution of the original corpus:")
print(slot_distribution(corpus, svdict, coref).format_table())
