"""# Order choices change the constraint classes

On the tree 1-2, 2-3, 2-4, 4-5 the separator {2} occurs twice.  With the
DAG rooted at 3 we can pick two perfect orders.  One keeps the two
occurrences in separate classes; the other ties them together, which
removes two free parameters."""

from pdirichlet import catalog
from pdirichlet.family import analyse
from pdirichlet.prior import dimension_rank

for choice in (1, 2):
    fam = catalog.tree_family(choice)
    system = analyse(fam)[2]
    print(f"choice {choice}: order {fam.orders['p2'].cliques}")
    for slots, exprs in system.linked_groups():
        print("   ", [s.label for s in slots], "<-", sorted(map(str, exprs)))
    print("    dimension:", dimension_rank(fam))
