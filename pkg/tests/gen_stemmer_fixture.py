"""Regenerate tests/data/stemmer_fixture.tsv (1,000 word/stem pairs).

Run from the repository root:  python3 tests/gen_stemmer_fixture.py

The expected stems come from the independent oracle in stemmer_oracle.py;
the word list mixes clinical-note vocabulary, inflection families for
every suffix group the algorithm handles, irregular/invariant forms, and
region-edge constructions.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from stemmer_oracle import oracle_stem

BASES = [
    "note", "bleed", "infect", "operate", "medicate", "stabilize", "dose",
    "treat", "examine", "discharge", "admit", "monitor", "observe", "record",
    "relate", "create", "generate", "communicate", "arsenic", "general",
    "nation", "rational", "sensation", "condition", "function", "formal",
    "active", "passive", "decisive", "massive", "relative", "native",
    "happy", "busy", "easy", "early", "likely", "friendly", "costly",
    "hope", "care", "use", "state", "size", "type", "time", "dose",
    "plan", "stop", "run", "trip", "ship", "control", "patrol", "refer",
    "agree", "free", "flee", "see", "guarantee",
    "cry", "try", "deny", "apply", "supply", "rely", "carry", "marry",
    "study", "copy", "vary", "bury", "worry",
]

SUFFIX_FAMILIES = [
    ("", "s", "es", "ed", "ing", "ly", "ings", "er", "ers", "est"),
    ("ization", "izations", "izer", "izers", "ize", "izes", "ized", "izing"),
    ("ational", "ation", "ations", "ator", "ators", "ate", "ates", "ated", "ating"),
    ("fulness", "ousness", "iveness", "ness"),
    ("tional", "tionally", "tion", "tions"),
    ("biliti", "bilities", "bility", "ble", "bly", "bles"),
    ("alism", "aliti", "ality", "alities", "alli", "ally", "al", "als"),
    ("ousli", "ously", "ous", "entli", "ently", "ent", "ence", "ences",
     "ance", "ances", "ant", "ants"),
    ("iviti", "ivity", "ivities", "ive", "ives"),
    ("enci", "ency", "encies", "anci", "ancy", "ancies"),
    ("abli", "ably", "able", "ables", "ible", "ibles"),
    ("lessli", "lessly", "less"),
    ("fulli", "fully", "ful"),
    ("icate", "icated", "iciti", "icity", "ical", "ically", "ic", "ics"),
    ("ative", "atively", "ement", "ements", "ment", "ments"),
    ("ism", "isms", "ion", "ions", "sion", "sions", "tion", "iti", "ity"),
]

CLINICAL = """
patient patients history histories diagnosis diagnoses symptom symptoms
fever fevers cough coughing coughed wheeze wheezing breathless breathlessness
pneumonia sepsis septic shock hypotension hypotensive hypertension hypertensive
diabetes diabetic mellitus insulin glucose glycemic hyperglycemia hypoglycemia
renal kidney kidneys failure failing failed dialysis catheter catheterization
catheterized urinary urination urinated urine infection infections infectious
bleeding bleeds bled hemorrhage hemorrhagic hemorrhaging anemia anemic
transfusion transfusions transfused gastrointestinal gastric intestinal
abdominal abdomen pain painful painless nausea nauseated vomiting vomited
diarrhea constipation constipated bowel bowels obstruction obstructed
cardiac cardiology cardiologist coronary artery arteries arterial
myocardial infarction ischemia ischemic angina stenosis stented stenting
bypass grafting grafted ventricular atrial fibrillation flutter arrhythmia
pulmonary respiratory respiration ventilation ventilated ventilator
intubation intubated extubated oxygen oxygenation saturation saturated
neurological neurology seizure seizures convulsion stroke strokes embolism
embolic thrombosis thrombotic anticoagulation anticoagulated heparin
warfarin aspirin antibiotic antibiotics vancomycin ceftriaxone cultures
cultured bacterial bacteremia viral fungal biopsy biopsies malignancy
malignant benign metastatic metastases metastasis chemotherapy radiation
radiotherapy oncology surgical surgery surgeries incision incisions sutured
sutures wound wounds healing healed swelling swollen edema edematous
fracture fractures fractured dislocation sprained inflammation inflamed
inflammatory steroid steroids prednisone tapering tapered medication
medications prescribed prescription prescriptions dosage dosages titrated
titration weaned weaning discharged admission admissions readmission
hospitalization hospitalized transferred transferring consultation
consulted consulting evaluation evaluated evaluating assessment assessed
examination examined stable stabilized stabilizing improving improved
worsening worsened deteriorating deteriorated resolving resolved
respond responded responsive unresponsive alert oriented confusion
confused lethargic obtunded sedated sedation agitation agitated
ambulating ambulatory mobility immobilized therapy therapies therapist
rehabilitation follow followup scheduled monitoring monitored vital vitals
temperature pulse pressure systolic diastolic elevated decreased increased
normal abnormal laboratory creatinine sodium potassium chloride
bicarbonate hemoglobin hematocrit platelet platelets leukocytosis white
count counts differential imaging radiograph radiographic tomography
ultrasound echocardiogram electrocardiogram findings finding noted notable
significant significantly unremarkable remarkable consistent consistency
"""

GENERAL = """
running runner runs ran easily easier easiest happiness happier happily
national international nationalize nationalization rationalization
organization organizational organize organized organizing organizer
realization realize realized realizing really realistic
civilization civilize civilized activation activate activated activating
creation creative creatively creativity created creating creator
decision decisive decisively dependence dependent dependable dependably
difference different differently difficulty dignitary dimension
disappearance disappointed discussion distribution division documentation
education educational effective effectiveness efficiency efficient
electricity electrical elimination emergency emotional emphasis employment
encouragement engineering enjoyment entertainment enthusiasm environment
environmental equipment establishment estimation evolution exaggeration
excitement exclusion excursion exhibition existence expansion expectation
experience experienced experiment experimental explanation exploration
expression extension fabulous faculties fairness faithful faithfully
familiarity fashionable feathery federation fellowship fictional
finalize finalization financially flexibility formation formulate
foundation fragmentation freedom frequently friendliness fulfillment
generalize generalization generation generosity generous gentleness
glorious government gradually graduation gratitude greatness guidance
handful happening hardness harmless harmony headquarters healthiness
helpfulness helpless hesitation historical homelessness honestly
hopefulness hopelessly hospitality humanity hypothesis identical
identification illustration imagination imitation immediately
implication importance impression improvement inclusion independence
indication individuality industrial inevitable influential information
innovation inspiration installation institution instruction instrumental
intelligence intensity intention interaction international interpretation
introduction investigation invitation involvement irritation isolation
justification kindness knowledgeable laziness leadership legalization
liberation limitation literally liveliness loneliness loveliness loyalty
luckily magically magnificent maintenance management marvelous maturity
measurement mechanical meditation membership memorize mentally
militarization minimize miraculous miserably modernization modification
momentarily motivation movement multiplication mysteriously
"""

EDGE_CASES = """
skis skies dying lying tying idly gently ugly early only singly sky news
howe atlas cosmos bias andes inning innings outing outings canning
cannings herring herrings earring earrings proceed proceeds proceeded
proceeding exceed exceeds exceeded exceeding succeed succeeds succeeded
succeeding die dies died lie lies lied tie ties tied ski skiing
cry cries cried crying try tries tried trying by my say says stay stays
stayed staying buy buys buying boy boys toy toys day days key keys
yes yet you your yellow yield young youth yearly yeast
ow owl own owed owing ate eating eaten
agreed agreeing feed feeds feeding freed freeing indeed speed speeds
exceedingly succeedingly abatements abating abated scrambling scrambled
gases gasses glasses classes masses passes misuses miscues fusses
crosses bosses buses busses viruses campus campuses thus us plus
this his is was has printless tubeless
luxuriating luxuriated conspicuous conspicuously
hopping hopped hoping hoped filing filling filled fitting fitted
dropped dropping stopped stopping planned planning pinned pinning
controlled controlling patrolled patrolling referred referring
conferred conferring preferred preferring occurred occurring
mattered mattering offered offering suffered suffering
panicked panicking mimicked mimicking trafficked trafficking
communication communicated communing communal communicable
generating generated generational generically generative
arsenal arsenals arsenic
350mg 20mg q8h x3days po2 spo2 o2sat
lab123 75yo m45 covid19 h1n1 b12 d3
anesthesia anesthetic apnea apneic ascites asystole atelectasis
"""


def word_list() -> list[str]:
    words: list[str] = []
    seen: set[str] = set()

    def add(w: str) -> None:
        w = w.strip().lower()
        if w and w not in seen:
            seen.add(w)
            words.append(w)

    for blob in (EDGE_CASES, CLINICAL, GENERAL):
        for w in blob.split():
            add(w)
    for base in BASES:
        add(base)
        add(base + "'s")
    for family in SUFFIX_FAMILIES:
        for i, base in enumerate(BASES):
            if i % 3 == 0:
                root = base[:-1] if base.endswith("e") else base
                for suf in family:
                    add(root + suf)
    return words


def main() -> None:
    words = word_list()
    assert len(words) >= 1000, f"only {len(words)} candidate words"
    chosen = words[:1000]
    out = Path(__file__).parent / "data" / "stemmer_fixture.tsv"
    with open(out, "w", encoding="utf-8") as fh:
        for w in chosen:
            fh.write(f"{w}\t{oracle_stem(w)}\n")
    print(f"wrote {len(chosen)} pairs to {out}")


if __name__ == "__main__":
    main()
