"""The tractable side: a 0-eccentric path, its loop-connected core and a majority polymorphism."""

from qcsp_forests.graphs import path_order, path_word
from qcsp_forests.logic import SentenceSampler, sample_sentence
from qcsp_forests.polymorph import f1_table, is_majority, is_polymorphism
from qcsp_forests.solver import evaluate
from qcsp_forests.surject import equivalence_witness_path, format_matrix, surhom_labels

print("surhom(4):")
print(format_matrix(surhom_labels(4)))

for word, method in (("0100", "unbalanced"), ("01100", "eccentric")):
    wit = equivalence_witness_path(word, method=method)
    core = path_word(wit.core, path_order(wit.core))
    print(f"{word} -> core {core}: source^{wit.t} onto core, core^{wit.s} onto source, "
          f"verified={wit.verify()}")
    f = f1_table(wit.core)
    print(f"  majority polymorphism on the core: {is_majority(f) and is_polymorphism(f, wit.core)}")
    sampler = SentenceSampler(seed=1, max_vars=6)
    same = sum(evaluate(sample_sentence(sampler, i), wit.source)
               == evaluate(sample_sentence(sampler, i), wit.core) for i in range(100))
    print(f"  100 sampled sentences, same verdict on both: {same}")
