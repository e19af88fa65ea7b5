"""Peacefulness of a few colourings of small graphs, checked against the
exact optimum from the branch-and-bound oracle."""
from peacekit.graph import cycle_graph, petersen_graph
from peacekit.oracle import certify_no_peaceful, min_peacefulness_exact
from peacekit.peace import PartialColouring, greedy_complete, peace_report


def show(name, g, c):
    greedy = greedy_complete(g, PartialColouring.empty(g.n, c)).colouring
    rep = peace_report(g, greedy)
    p_star, witness = min_peacefulness_exact(g, c)
    print(f"{name}: {g.n} vertices, max degree {g.delta}, {c} colours")
    print(f"  greedy colouring      {greedy.to_list()}")
    print(f"  disturbed per vertex  {rep.disturbed.tolist()}  -> peacefulness {rep.peacefulness}")
    print(f"  optimum               {p_star}, attained by {witness.to_list()}")
    if p_star:
        print(f"  nothing is {p_star - 1}-peaceful: {certify_no_peaceful(g, c, p_star - 1)}")


if __name__ == "__main__":
    show("C5", cycle_graph(5), 3)
    show("Petersen", petersen_graph(), 4)
