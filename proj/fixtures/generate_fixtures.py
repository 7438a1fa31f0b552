#!/usr/bin/env python3
"""Regenerates the synthetic mini-mimic / mini-eicu fixture databases.

Values mirror the formats of the two public EHR schemas (integer vs dotted
ICD codes, F/M vs Female/Male, integer vs short-text diagnosis priority),
but every row is synthetic. Output is deterministic for a given seed.

    python3 fixtures/generate_fixtures.py [--seed 20231]
"""

import argparse
import csv
import pathlib
import random

HERE = pathlib.Path(__file__).resolve().parent

# ---------------------------------------------------------------- vocabularies

ICD = [  # (mimic code, eicu code string, mimic short diagnosis, eicu diagnosisstring)
    ("41071", "410.71, I21.4", "ACUTE MYOCARDIAL INFARCTION",
     "cardiovascular|chest pain / ASHD|acute coronary syndrome|acute myocardial infarction (no ST elevation)"),
    ("41401", "414.01, I25.10", "CORONARY ARTERY DISEASE",
     "cardiovascular|chest pain / ASHD|coronary artery disease"),
    ("4280", "428.0, I50.9", "CONGESTIVE HEART FAILURE",
     "cardiovascular|ventricular disorders|congestive heart failure"),
    ("42731", "427.31, I48.0", "ATRIAL FIBRILLATION",
     "cardiovascular|arrhythmias|atrial fibrillation"),
    ("5849", "584.9, N17.9", "ACUTE RENAL FAILURE",
     "renal|disorder of kidney|acute renal failure"),
    ("4019", "401.9, I10", "HYPERTENSION",
     "cardiovascular|vascular disorders|hypertension"),
    ("25000", "250.00, E11.9", "DIABETES MELLITUS",
     "endocrine|glucose metabolism|diabetes mellitus"),
    ("486", "486, J18.9", "PNEUMONIA",
     "pulmonary|pulmonary infections|pneumonia"),
    ("0389", "038.9, A41.9", "SEPSIS",
     "infectious diseases|systemic/other infections|sepsis"),
    ("51881", "518.81, J96.00", "ACUTE RESPIRATORY FAILURE",
     "pulmonary|respiratory failure|acute respiratory failure"),
    ("5789", "578.9, K92.2", "GASTROINTESTINAL BLEED",
     "gastrointestinal|GI bleeding / PUD|GI bleeding"),
    ("78650", "786.50, R07.9", "CHEST PAIN",
     "cardiovascular|chest pain / ASHD|chest pain"),
    ("2724", "272.4, E78.5", "HYPERLIPIDEMIA",
     "endocrine|lipid disorders|hyperlipidemia"),
    ("5990", "599.0, N39.0", "URINARY TRACT INFECTION",
     "renal|infections|urinary tract infection"),
    ("V4582", "V45.82, Z95.5", "CORONARY ANGIOPLASTY STATUS",
     "cardiovascular|chest pain / ASHD|s/p PTCA"),
    ("V5861", "V58.61, Z79.01", "LONG-TERM ANTICOAGULANT USE",
     "hematology|coagulation disorders|anticoagulation"),
]

DRUGS = [  # (mimic drug, eicu drugname, mimic dose, eicu dosage)
    ("Aspirin", "ASPIRIN 81 MG PO CHEW", "81", "81 mg"),
    ("Aspirin EC", "ASPIRIN EC 325 MG PO TBEC", "325", "325 mg"),
    ("Metoprolol Tartrate", "METOPROLOL TARTRATE 25 MG PO TABS", "25", "25 mg"),
    ("Metoprolol Tartrate", "METOPROLOL TARTRATE 5 MG/5ML IV SOLN", "12.5", "12.5 mg"),
    ("Lisinopril", "LISINOPRIL 5 MG PO TABS", "5", "5 mg"),
    ("Atorvastatin", "ATORVASTATIN CALCIUM 40 MG PO TABS", "40", "40 mg"),
    ("Atorvastatin", "ATORVASTATIN CALCIUM 80 MG PO TABS", "80", "80 mg"),
    ("Heparin", "HEPARIN SODIUM (PORCINE) 5000 UNIT/ML IJ SOLN", "5000", "5000 Units"),
    ("Heparin", "HEPARIN 25000 UNITS IN D5W 250 ML", "1000", "1000 Units/hr"),
    ("Clopidogrel Bisulfate", "CLOPIDOGREL 75 MG PO TABS", "75", "75 mg"),
    ("Furosemide", "FUROSEMIDE 10 MG/ML IJ SOLN", "20", "20 mg"),
    ("Furosemide", "FUROSEMIDE 40 MG PO TABS", "40", "40 mg"),
    ("Insulin", "INSULIN REGULAR HUMAN 100 UNIT/ML IJ SOLN", "0-10", "0-10 Units"),
    ("Potassium Chloride", "POTASSIUM CHLORIDE 20 MEQ PO PACK", "20", "20 mEq"),
    ("Docusate Sodium", "DOCUSATE SODIUM 100 MG PO CAPS", "100", "100 mg"),
    ("Acetaminophen", "ACETAMINOPHEN 325 MG PO TABS", "325-650", "650 mg"),
    ("Pantoprazole", "PANTOPRAZOLE SODIUM 40 MG PO TBEC", "40", "40 mg"),
    ("Nitroglycerin", "NITROGLYCERIN 0.4 MG SL SUBL", "0.4", "0.4 mg"),
    ("Enoxaparin Sodium", "ENOXAPARIN SODIUM 40 MG/0.4ML SC SOLN", "40", "40 mg"),
    ("Morphine Sulfate", "MORPHINE SULFATE 2 MG/ML IJ SOLN", "2-4", "2-4 mg"),
]

MIMIC_ROUTES = ["PO", "IV", "SC", "IV DRIP", "NG", "PO/NG", "SL", "IH"]
EICU_ROUTES = ["PO", "IV", "SC", "IV DRIP", "NG", "SL", "IV PUSH", "Oral", "INH"]

MIMIC_ADMIT_LOC = ["EMERGENCY ROOM ADMIT", "PHYS REFERRAL/NORMAL DELI", "TRANSFER FROM HOSP/EXTRAM",
                   "CLINIC REFERRAL/PREMATURE", "TRANSFER FROM SKILLED NUR", "TRANSFER FROM OTHER HEALT"]
EICU_ADMIT_SRC = ["Emergency Department", "Direct Admit", "Other Hospital", "Operating Room",
                  "Floor", "Recovery Room", "Step-Down Unit (SDU)", "Acute Care/Floor"]

MIMIC_DISCH_LOC = ["HOME", "HOME HEALTH CARE", "SNF", "REHAB/DISTINCT PART HOSP", "DEAD/EXPIRED",
                   "LONG TERM CARE HOSPITAL", "SHORT TERM HOSPITAL", "HOSPICE-HOME"]
EICU_DISCH_LOC = ["Home", "Skilled Nursing Facility", "Rehabilitation", "Death", "Nursing Home",
                  "Other Hospital", "Other External", "Home Health Care"]

INSURANCE = ["Medicare", "Private", "Medicaid", "Government", "Self Pay"]
MIMIC_ETHNICITY = ["WHITE", "BLACK/AFRICAN AMERICAN", "HISPANIC OR LATINO", "ASIAN",
                   "UNKNOWN/NOT SPECIFIED", "OTHER", "AMERICAN INDIAN/ALASKA NATIVE"]
EICU_ETHNICITY = ["Caucasian", "African American", "Hispanic", "Asian", "Native American",
                  "Other/Unknown"]

HISTORY = ["Hypertension", "Coronary artery disease", "Diabetes - insulin dependent",
           "Congestive heart failure", "Atrial fibrillation", "COPD", "Chronic renal failure",
           "Hyperlipidemia", "Stroke", "Asthma"]
EICU_HISTORY = ["hypertension requiring treatment", "coronary artery disease",
                "insulin dependent diabetes", "congestive heart failure", "atrial fibrillation",
                "COPD - moderate", "renal insufficiency", "hyperlipidemia", "stroke", "asthma"]

LAB_NAMES = ["sodium", "potassium", "chloride", "BUN", "creatinine", "glucose", "Hgb", "Hct",
             "WBC x 1000", "platelets x 1000", "troponin - I", "CPK-MB", "lactate", "pH", "paO2"]
CUSTOM_LABS = ["HbA1c", "BNP", "D-dimer", "ammonia", "lipase", "TSH", "procalcitonin"]
NURSE_LABELS = ["Heart Rate", "Respiratory Rate", "Non-Invasive BP Systolic", "Temperature (C)",
                "O2 Saturation", "Pain Score", "GCS Total"]
NOTE_TYPES = ["Progress", "Admission", "Nursing Assessment", "Discharge"]
UNIT_TYPES = ["Med-Surg ICU", "CCU-CTICU", "MICU", "Cardiac ICU", "Neuro ICU", "SICU", "CSICU"]
FREQUENCIES = ["Q6H", "Daily", "BID", "TID", "PRN", "Once", "Q4H PRN", "QHS"]
ALLERGIES = ["penicillins", "sulfa (sulfonamide antibiotics)", "codeine", "morphine", "latex",
             "iodinated contrast media", "shellfish", "aspirin"]
TREATMENTS = ["cardiovascular|myocardial ischemia / infarction|antiplatelet agent|aspirin",
              "cardiovascular|myocardial ischemia / infarction|beta blocker",
              "pulmonary|ventilation and oxygenation|mechanical ventilation",
              "renal|dialysis|hemodialysis",
              "infectious diseases|medications|antibacterials|penicillins",
              "cardiovascular|arrhythmias|anticoagulant administration|heparin"]
ADMIT_DX = ["Infarction, acute myocardial (MI)", "CHF, congestive heart failure",
            "Sepsis, pulmonary", "Rhythm disturbance (atrial, supraventricular)",
            "Chest pain, unknown origin", "Renal failure, acute", "Bleeding, upper GI"]
CELL_LABELS = ["Urine", "Intake Total", "Output Total", "Crystalloids", "Blood Loss", "Stool"]
SPECIALTY = ["cardiology", "critical care medicine (CCM)", "internal medicine", "nephrology",
             "pulmonology", "surgery-general"]


class Gen:
    def __init__(self, seed):
        self.r = random.Random(seed)

    def pick(self, seq):
        return self.r.choice(seq)

    def randint(self, a, b):
        return self.r.randint(a, b)

    def flt(self, lo, hi, nd=1):
        return f"{self.r.uniform(lo, hi):.{nd}f}"

    def maybe_null(self, value, p=0.05):
        return "" if self.r.random() < p else value


def write_table(root, name, header, rows):
    root.mkdir(parents=True, exist_ok=True)
    with open(root / f"{name}.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_unlinked(root, name, header, rows):
    # Stay ids only appear in the four clinical tables.
    i = header.index("patientunitstayid")
    write_table(root, name, header[:i] + header[i + 1:], [r[:i] + r[i + 1:] for r in rows])


# ----------------------------------------------------------------- mini-mimic

def make_mimic(g, root):
    patients = []
    subject_ids = g.r.sample(range(10006, 99999), 60)
    for sid in subject_ids:
        year = g.randint(2040, 2110)
        dob = f"{year}-{g.randint(1, 12):02d}-{g.randint(1, 28):02d} 00:00:00"
        patients.append([sid, g.pick(["F", "M"]), dob, g.pick(["0", "1"])])
    write_table(root, "patients", ["subject_id", "gender", "dob", "expire_flag"], patients)

    admissions = []
    hadm_ids = g.r.sample(range(100001, 199999), 90)
    for hid in hadm_ids:
        sid = g.pick(subject_ids)
        year = g.randint(2100, 2200)
        admit = (f"{year}-{g.randint(1, 12):02d}-{g.randint(1, 28):02d} "
                 f"{g.randint(0, 23):02d}:{g.randint(0, 59):02d}:00")
        code = g.pick(ICD)
        admissions.append([sid, hid, admit, g.pick(MIMIC_ADMIT_LOC), g.pick(MIMIC_DISCH_LOC),
                           g.pick(INSURANCE), g.pick(MIMIC_ETHNICITY), code[2]])
    write_table(root, "admissions",
                ["subject_id", "hadm_id", "admittime", "admission_location", "discharge_location",
                 "insurance", "ethnicity", "diagnosis"], admissions)

    dx = []
    for adm in admissions:
        for seq in range(1, g.randint(2, 6)):
            dx.append([adm[0], adm[1], seq, g.pick(ICD)[0]])
    write_table(root, "diagnoses_icd", ["subject_id", "hadm_id", "seq_num", "icd9_code"], dx)

    chart = []
    for _ in range(220):
        adm = g.pick(admissions)
        kind = g.r.random()
        if kind < 0.45:
            value = g.pick(HISTORY)
        elif kind < 0.7:
            value = g.flt(35.5, 40.0)
        else:
            value = str(g.randint(50, 180))
        chart.append([adm[0], adm[1], g.pick([220045, 220179, 223761, 225811]), value])
    write_table(root, "chartevents", ["subject_id", "hadm_id", "itemid", "value"], chart)

    rx = []
    for _ in range(200):
        adm = g.pick(admissions)
        drug = g.pick(DRUGS)
        rx.append([adm[0], adm[1], drug[0], g.pick(MIMIC_ROUTES), drug[2]])
    write_table(root, "prescriptions", ["subject_id", "hadm_id", "drug", "route", "dose_val_rx"],
                rx)

    # A column that is always empty: exercises the skipped-column path.
    write_table(root, "services", ["hadm_id", "curr_service", "transfertime"],
                [[adm[1], g.pick(["CMED", "MED", "CSURG"]), ""] for adm in admissions[:20]])


# ------------------------------------------------------------------ mini-eicu

def make_eicu(g, root):
    stays = g.r.sample(range(141000, 3353000), 80)
    hospital_ids = [73, 110, 122, 142, 167, 176, 188, 243, 264, 338, 420, 443]

    patients = []
    for stay in stays:
        uniquepid = f"{g.randint(0, 35):03d}-{g.randint(1, 99999):05d}"
        age = g.pick([str(g.randint(18, 89)), "> 89"])
        patients.append([
            stay, g.randint(128000, 2743000), uniquepid, g.pick(["Female", "Male"]), age,
            g.pick(EICU_ETHNICITY), g.pick(hospital_ids), g.pick(ADMIT_DX),
            g.flt(150, 195, 1),
            f"{g.randint(0, 23):02d}:{g.randint(0, 59):02d}:00", -g.randint(0, 20000),
            g.pick(EICU_ADMIT_SRC), g.pick(["2014", "2015"]),
            f"{g.randint(0, 23):02d}:{g.randint(0, 59):02d}:00", g.randint(500, 30000),
            g.pick(EICU_DISCH_LOC), g.pick(["Alive", "Expired"]), g.pick(UNIT_TYPES),
            g.randint(1, 3), g.pick(["admit", "stepdown/other", "readmit"]),
            g.flt(45, 140, 1), g.maybe_null(g.flt(45, 140, 1), 0.2),
            g.pick(["Floor", "Home", "Step-Down Unit (SDU)", "Death", "Other ICU"]),
        ])
    write_table(root, "patient", [
        "patientunitstayid", "patienthealthsystemstayid", "uniquepid", "gender", "age",
        "ethnicity", "hospitalid", "apacheadmissiondx", "admissionheight", "hospitaladmittime24",
        "hospitaladmitoffset", "hospitaladmitsource", "hospitaldischargeyear",
        "hospitaldischargetime24", "hospitaldischargeoffset", "hospitaldischargelocation",
        "hospitaldischargestatus", "unittype", "unitvisitnumber", "unitstaytype",
        "admissionweight", "dischargeweight", "unitdischargelocation"], patients)

    dx = []
    for i in range(240):
        code = g.pick(ICD)
        dx.append([3400000 + i * 7, g.pick(stays), g.pick(["True", "False"]),
                   g.randint(0, 9000), code[3], g.maybe_null(code[1], 0.1),
                   g.pick(["Primary", "Major", "Other"])])
    write_table(root, "diagnosis", ["diagnosisid", "patientunitstayid", "activeupondischarge",
                                    "diagnosisoffset", "diagnosisstring", "icd9code",
                                    "diagnosispriority"], dx)

    med = []
    for i in range(220):
        drug = g.pick(DRUGS)
        med.append([12000000 + i * 13, g.pick(stays), g.randint(-300, 8000), g.randint(0, 8000),
                    g.pick(["No", "Yes"]), g.pick(["No", "Yes"]), drug[1], g.randint(1000, 40000),
                    drug[3], g.pick(EICU_ROUTES), g.pick(FREQUENCIES), g.pick(["No", "Yes"])])
    write_table(root, "medication", [
        "medicationid", "patientunitstayid", "drugorderoffset", "drugstartoffset",
        "drugivadmixture", "drugordercancelled", "drugname", "drughiclseqno", "dosage",
        "routeadmin", "frequency", "prn"], med)

    ph = []
    for i in range(160):
        idx = g.randint(0, len(EICU_HISTORY) - 1)
        text = EICU_HISTORY[idx]
        ph.append([5000000 + i * 3, g.pick(stays), g.randint(0, 300),
                   g.pick(["Past History", "Admission"]),
                   "notes/Progress Notes/Past History/Organ Systems/" + text.replace(" ", "_"),
                   text.title(), text])
    write_table(root, "pasthistory", ["pasthistoryid", "patientunitstayid", "pasthistoryoffset",
                                      "pasthistorynotetype", "pasthistorypath", "pasthistoryvalue",
                                      "pasthistoryvaluetext"], ph)

    lab = []
    for i in range(200):
        name = g.pick(LAB_NAMES)
        lab.append([70000000 + i * 11, g.pick(stays), g.randint(-500, 9000), g.randint(1, 9),
                    name, g.flt(0.1, 300, 2), g.flt(0.1, 300, 1),
                    g.pick(["mmol/L", "mg/dL", "%", "K/mcL", "ng/mL"]), g.randint(-500, 9500)])
    write_unlinked(root, "lab", ["labid", "patientunitstayid", "labresultoffset", "labtypeid",
                              "labname", "labresult", "labresulttext", "labmeasurenamesystem",
                              "labresultrevisedoffset"], lab)

    vp = []
    for i in range(200):
        vp.append([400000000 + i * 17, g.pick(stays), g.randint(0, 10000), g.flt(35.5, 39.5, 1),
                   g.randint(85, 100), g.randint(45, 150), g.randint(8, 35), g.randint(80, 190),
                   g.randint(40, 110), g.randint(55, 130)])
    write_unlinked(root, "vitalperiodic", ["vitalperiodicid", "patientunitstayid",
                                        "observationoffset", "temperature", "sao2", "heartrate",
                                        "respiration", "systemicsystolic", "systemicdiastolic",
                                        "systemicmean"], vp)

    nc = []
    for i in range(180):
        label = g.pick(NURSE_LABELS)
        nc.append([300000000 + i * 5, g.pick(stays), g.randint(0, 9000),
                   g.pick(["Vital Signs", "Scores", "Other Vital Signs and Infusions"]), label,
                   label.replace(" ", ""), str(g.randint(0, 180))])
    write_unlinked(root, "nursecharting", ["nursingchartid", "patientunitstayid",
                                        "nursingchartoffset", "nursingchartcelltypecat",
                                        "nursingchartcelltypevallabel",
                                        "nursingchartcelltypevalname", "nursingchartvalue"], nc)

    notes = []
    for i in range(120):
        ntype = g.pick(NOTE_TYPES)
        notes.append([20000000 + i * 3, g.pick(stays), g.randint(0, 9000), ntype,
                      f"notes/{ntype}/HPI/HPI", g.pick(["Performed", "Yes", "Not Performed"]),
                      g.pick(HISTORY).lower() + " noted on admission"])
    write_unlinked(root, "note", ["noteid", "patientunitstayid", "noteoffset", "notetype", "notepath",
                               "notevalue", "notetext"], notes)

    tr = []
    for i in range(150):
        tr.append([8000000 + i * 9, g.pick(stays), g.randint(0, 9000), g.pick(TREATMENTS),
                   g.pick(["True", "False"])])
    write_unlinked(root, "treatment", ["treatmentid", "patientunitstayid", "treatmentoffset",
                                    "treatmentstring", "activeupondischarge"], tr)

    al = []
    for i in range(100):
        al.append([900000 + i * 7, g.pick(stays), g.randint(0, 3000),
                   g.pick(["Admission", "Allergy"]), g.pick(SPECIALTY),
                   g.pick(["Critical Care Physician", "Nurse", "Resident"]),
                   g.pick(["True", "False"]), g.pick(["Drug", "Non Drug"]), g.pick(ALLERGIES)])
    write_unlinked(root, "allergy", ["allergyid", "patientunitstayid", "allergyoffset",
                                  "allergynotetype", "specialtytype", "usertype", "writtenineicu",
                                  "allergytype", "allergyname"], al)

    io = []
    for i in range(150):
        label = g.pick(CELL_LABELS)
        io.append([60000000 + i * 19, g.pick(stays), g.randint(0, 9000), g.flt(0, 3000, 1),
                   g.flt(0, 3000, 1), g.flt(-2000, 2000, 1), g.randint(0, 9100),
                   "flowsheet|Flowsheet Cell Labels|I&O|" + label, label, g.flt(0, 1500, 1)])
    write_unlinked(root, "intakeoutput", ["intakeoutputid", "patientunitstayid",
                                       "intakeoutputoffset", "intaketotal", "outputtotal",
                                       "nettotal", "intakeoutputentryoffset", "cellpath",
                                       "celllabel", "cellvaluenumeric"], io)

    cl = []
    for i in range(90):
        cl.append([10000 + i * 3, g.pick(stays), g.randint(0, 9000), g.randint(1, 8),
                   g.pick(CUSTOM_LABS), g.flt(0.1, 900, 2),
                   g.pick(["positive", "negative", "pending", "see comment", "trace"])])
    write_unlinked(root, "customlab", ["customlabid", "patientunitstayid", "labotheroffset",
                                    "labothertypeid", "labothername", "labotherresult",
                                    "labothervaluetext"], cl)

    write_table(root, "hospital", ["hospitalid", "numbedscategory", "teachingstatus", "region"],
                [[h, g.pick(["<100", "100 - 249", "250 - 499", ">= 500"]), g.pick(["t", "f"]),
                  g.pick(["Midwest", "South", "West", "Northeast"])] for h in hospital_ids])

    aps = []
    for i in range(80):
        aps.append([30000 + i, stays[i % len(stays)], g.pick(["0", "1"]), g.pick(["0", "1"]),
                    g.randint(1, 4), g.randint(1, 6), g.flt(0, 6000, 1), g.flt(0.5, 40, 2),
                    g.randint(8, 45), g.flt(120, 160, 1), g.flt(40, 150, 0), g.flt(7.0, 7.6, 2),
                    g.flt(20, 50, 1), g.flt(0.4, 8, 2), g.flt(1.5, 5, 1), g.flt(50, 400, 0),
                    g.flt(5, 120, 0), g.flt(60, 500, 0), g.randint(21, 100)])
    write_unlinked(root, "apacheapsvar", ["apacheapsvarid", "patientunitstayid", "intubated", "vent",
                                       "eyes", "motor", "urine", "wbc", "respiratoryrate",
                                       "sodium", "meanbp", "ph", "hematocrit", "creatinine",
                                       "albumin", "pao2", "bun", "glucose", "fio2"], aps)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=20231)
    args = ap.parse_args()
    make_mimic(Gen(args.seed), HERE / "mini-mimic")
    make_eicu(Gen(args.seed + 1), HERE / "mini-eicu")


if __name__ == "__main__":
    main()
