import random

import numpy as np
import pytest

from cluecraft.embeddings import EmbeddingStore

# Public-domain sample list of common nouns; stands in for the official
# 208 card words, which are not bundled.
WORDLIST = """
air amazon angel apple arm australia back ball band bank bar bark bat beach
bear beat bed beijing bell belt berlin bill bird blade block board bomb bond
boom boot bottle bow box bridge brush buck buffalo bug button calf canada cap
capital car card carrot case cast cat cell chair change charge check chest
china chick chocolate church circle cliff cloak club code cold comic compound
concert conductor contract cook copper corn cotton court cover crane crash
cricket cross crown cycle dance date day death deck degree diamond dice dinosaur
disease doctor dog draft dragon dress drill drop duck dwarf eagle egypt embassy
engine england europe eye face fair fall fan farm fence field fighter figure
file film fire fish flute fly foot force forest fork france game gas ghost
giant glass glove gold grace grass greece green ground ham hand hawk head
heart helicopter himalayas hole hood hook horn horse horseshoe hospital hotel
ice india iron ivory jack jam jet jupiter kangaroo ketchup key kid king kiwi
knife knight lab lap laser lawyer lead lemon leprechaun life light limousine
line link lion litter loch log london luck mail mammoth maple marble march
mass match mercury mexico microscope millionaire mine mint missile model mole
moon moscow mount mouse mouth mug nail needle net night ninja note novel nurse
nut octopus oil olive opera orange organ palm pan pants paper parachute park
part pass paste penguin phoenix piano pie pilot pin pipe pirate pistol pit
pitch plane plate platypus play plot point poison pole police pool port post
pound press princess pumpkin pupil pyramid queen rabbit racket ray revolution
ring robin robot rock rome root rose roulette round row ruler satellite saturn
scale school scientist scorpion screen scuba seal server shadow shakespeare
shark ship shoe shop shot sink skyscraper slip slug smuggler snow snowman sock
soldier soul sound space spell spider spike spine spot spring spy square stadium
staff stamp star state stick stock straw stream strike string sub suit
superhero swing switch table tablet tag tail tap teacher telescope temple
theater thief thumb tick tie time tokyo tooth torch tower track train triangle
trip trunk tube turkey undertaker unicorn vacuum van vet wake wall war washer
watch water wave web well whale whip wind witch worm yard
""".split()


@pytest.fixture(scope="session")
def wordlist():
    assert len(set(WORDLIST)) == len(WORDLIST) and len(WORDLIST) >= 208
    return list(WORDLIST)


def random_vectors(tokens, dim, seed):
    """Integer-grid vectors: generic directions, no accidental zero rows."""
    rng = random.Random(seed)
    out = {}
    for token in tokens:
        while True:
            vec = [rng.randint(-5, 5) for _ in range(dim)]
            if any(vec):
                break
        out[token] = vec
    return out


def store_from(vectors, name="fixture"):
    return EmbeddingStore(name, {t: np.array(v, dtype=float) for t, v in vectors.items()})
