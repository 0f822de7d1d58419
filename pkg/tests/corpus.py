"""Script corpora shared by the sequence tests and the acceptance run."""
from qlspin.sequence import CANONICAL_DETECTION

VALID_SCRIPTS = [
    CANONICAL_DETECTION,
    "shuttle p b\npulse bsb p theta=pi\n",
    "exchange theta=pi/2\n",
    "pulse carrier p theta=pi phi=pi/2 detuning_hz=12.5 duration_s=0.01\n",
    "pump be\n",
    "detect be\n",
    "cool nbar=0.05\n",
    "cool nbar=0\n",
    "exchange duration_s=1.5e-3\n",
    "pulse rsb p theta=3*pi/4\npulse raman_rsb be theta=0.5\n",
    "  shuttle   p  c   # spaces and a comment\n\n\nshuttle be c\n",
    "pulse raman_bsb be theta=pi phi=-pi/3\n",
    "pulse carrier be theta=2*pi detuning_hz=-1e3\n",
    "pulse bsb p theta=.5 detuning_hz=+7 duration_s=2E-4\n",
    "# header\nshuttle p b\nshuttle p a\nshuttle p b\nshuttle p c\n",
    "pulse carrier p theta=0\n",
    "exchange theta=pi/4\nexchange theta=pi/4\n",
    "shuttle be c\nshuttle p c\ncool nbar=0.1\nshuttle be d\npump be\n",
    "pulse carrier p theta=1.0000000000000002 phi=0.1\n",
    "pulse carrier p theta=pi/3/2*4\n",
]

# (script, line, column) of the first reported error
MALFORMED_SCRIPTS = [
    ("shuttle p q\n", 1, 11),
    ("shuttle x a\n", 1, 9),
    ("shuttle p\n", 1, 10),
    ("shuttle p a b\n", 1, 13),
    ("jump p a\n", 1, 1),
    ("shuttle p a\npulse strobe p theta=pi\n", 2, 7),
    ("pulse bsb p\n", 1, 12),
    ("pulse bsb p theta=pie\n", 1, 19),
    ("pulse bsb p theta=1..2\n", 1, 19),
    ("pulse bsb p theta=pi power=3\n", 1, 22),
    ("pulse bsb p theta=pi theta=pi\n", 1, 22),
    ("pulse bsb p theta=-pi\n", 1, 19),
    ("pulse bsb p theta=pi/0\n", 1, 22),
    ("exchange\n", 1, 1),
    ("exchange theta=pi duration_s=1\n", 1, 1),
    ("exchange duration_s=0\n", 1, 21),
    ("cool nbar=abc\n", 1, 11),
    ("cool\n", 1, 5),
    ("detect\n", 1, 7),
    ("\n\n   # only comments\n", 3, 1),
]

# (script, expected violation substring)
VIOLATING_SCRIPTS = [
    ("exchange theta=pi/2\n", "exchange requires both particles in coupling zone"),
    ("shuttle p c\nexchange theta=pi/2\n", "exchange requires both particles in coupling zone"),
    ("detect p\n", "detect applies to coolant ion only"),
    ("pump p\n", "pump applies to coolant ion only"),
    ("shuttle be c\ndetect be\n", "detect requires the coolant ion in the cooling_detection zone"),
    ("pulse bsb be theta=pi\n", "rf sideband pulses apply to the proton only"),
    ("pulse bsb p theta=pi\n", "proton_sideband zone"),
    ("pulse raman_bsb p theta=pi\n", "raman pulses apply to the coolant ion only"),
    ("shuttle be c\npulse raman_bsb be theta=pi\n", "cooling_detection zone"),
    ("shuttle p d\n", "particles may only share the coupling zone"),
    ("shuttle p b\npulse carrier p theta=pi\n", "carrier pulse on p requires the precision zone"),
    ("shuttle be c\npulse carrier be theta=pi\n", "carrier pulse on be requires the cooling_detection zone"),
    ("cool nbar=0.1\n", "cool requires both particles in coupling zone"),
]
