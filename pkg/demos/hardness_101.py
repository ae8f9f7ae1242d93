"""Walk through the hardness side on the three-vertex path 101.

Classifies the path, builds the clause gadget, checks it against the
not-all-equal table and then compiles a few quantified instances, comparing
the compiled sentence with the boolean game tree.
"""

from qcsp_forests.classify import classify_path
from qcsp_forests.graphs import path_graph
from qcsp_forests.logic import print_sentence
from qcsp_forests.nae import qnae_true
from qcsp_forests.reduce import (choose_recipe, clause_gadget, compile_instance,
                                 gadget_extension_check, normalize, parse_qnae)
from qcsp_forests.solver import evaluate

WORD = "101"
template = path_graph(WORD)
verdict = classify_path(WORD)
print(f"{WORD}: {verdict.cls} ({verdict.reason})")

recipe = choose_recipe(WORD)
print("recipe:", recipe.summary())

table = gadget_extension_check(clause_gadget(recipe, template), recipe, template)
for bits, ok in sorted(table.items()):
    print("  literals", "".join(map(str, bits)), "->", "extends" if ok else "blocked")

for text in ("E x / c x x x",
             "E x / E y / E z / c x y z",
             "A x / E y / c x y y",
             "E y / A x / c y y x / c y x x"):
    inst = normalize(parse_qnae(text))
    sentence = compile_instance(inst, recipe, template)
    got = evaluate(sentence, template)
    want = qnae_true(inst.prefix, inst.clauses)
    print(f"{text:32} oracle={want!s:5} compiled={got!s:5} "
          f"({len(sentence.prefix)} variables)")

print()
print(print_sentence(compile_instance(parse_qnae("E x / c x x x"), recipe, template))[:200], "...")
