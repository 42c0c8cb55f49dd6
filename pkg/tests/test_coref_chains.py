from legal_deid.coref_chains import ChainSet, chain, to_partition
from legal_deid.ner_rules import Mention, Trigger
from legal_deid.person_names import PersonName, parse_person_name
from legal_deid.text_model import Span


def make(gaz, *surfaces, ambiguous=()):
    out = []
    pos = 0
    for k, s in enumerate(surfaces):
        parsed = s if isinstance(s, PersonName) else parse_person_name(s, gaz)
        text = s if isinstance(s, str) else s.render(False)
        out.append(Mention(Span(pos, pos + len(text)), text, parsed, Trigger.CAPITALIZED, k in ambiguous))
        pos += len(text) + 10
    return out


def groups(cs):
    return [[cs.mentions[i].surface for i in c.mention_indices] for c in cs.chains]


def test_family_court_variants(gaz):
    ms = make(
        gaz,
        "Pérez Rodríguez, Pedro",
        PersonName(("Pedro",), ("Pérez",)),
        PersonName(("Juan",), ("Pérez",)),
        "Pedro Pérez",
        "Pedro Pérez Rodríguez",
        "Pedro",
        "Juan",
    )
    cs = chain(ms)
    assert len(cs) == 2
    assert [sorted(c.mention_indices) for c in cs.chains] == [[0, 1, 3, 4, 5], [2, 6]]
    assert cs.chains[0].canonical.surnames == ("Pérez", "Rodríguez")


def test_prison_excerpt(gaz):
    cs = chain(make(gaz, "Juan Pérez", "María Rodríguez", "Sr. Pérez", "Juana Fernández"))
    assert groups(cs) == [["Juan Pérez", "Sr. Pérez"], ["María Rodríguez"], ["Juana Fernández"]]


def test_empty():
    cs = chain([])
    assert len(cs) == 0 and cs.mentions == ()
    assert len(to_partition(cs)) == 0


def test_ambiguity_never_merges(gaz):
    # "Pérez" fits both people equally well
    cs = chain(make(gaz, "Pedro Pérez", "Juan Pérez", "Sr. Pérez"))
    assert len(cs) == 3


def test_more_specific_chain_wins(gaz):
    # "Gómez Silva" fits both chains but shares two parts with the second
    cs = chain(make(gaz, "Ana Gómez", "Luis Gómez Silva", "Sr. Gómez Silva"))
    assert groups(cs) == [["Ana Gómez"], ["Luis Gómez Silva", "Sr. Gómez Silva"]]


def test_identical_surface_rejoins_its_chain(gaz):
    cs = chain(make(gaz, "Pedro Pérez", "Juan Pérez", "Sr. Pérez", "Sr. Pérez"))
    assert groups(cs)[-1] == ["Sr. Pérez", "Sr. Pérez"]


def test_ambiguous_mentions_are_unresolved(gaz):
    cs = chain(make(gaz, "Jorge Martínez, Juan Líber", "Juan", ambiguous=(0,)))
    assert cs.unresolved == (0,)
    assert cs.chain_of(0) is None and cs.chain_of(1) == 0


def test_partition_structure(gaz):
    cs = chain(make(gaz, "Juan Pérez", "María Rodríguez", "Sr. Pérez"))
    p = to_partition(cs)
    assert sorted(len(e) for e in p) == [1, 2]
    singles = chain(make(gaz, "Juan Pérez", "María Rodríguez"))
    assert all(len(e) == 1 for e in to_partition(singles))


def test_deterministic(gaz):
    ms = make(gaz, "Pedro Pérez", "Pedro", "Juan Pérez", "Sr. Pérez", "Juan")
    assert chain(ms) == chain(list(ms))
    assert isinstance(chain(ms), ChainSet)
