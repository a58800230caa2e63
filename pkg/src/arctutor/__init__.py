"""arctutor: an AC-3 tutoring engine with adaptive, explained hints.

The package couples a deterministic arc-consistency stepping engine with a
data-driven user model: interaction behavior is clustered offline into
higher/lower learning-gain groups, weighted association rules describe
each group, and an online classifier scores every action stream against
them. Lower-learning classifications drive ranked hints, and six generated
explanation pages show the live numbers behind each hint.
"""

__version__ = "0.1.0"
