"""Report bundle assembly.

Turns the evaluation tables into four CSV shapes plus a human-readable
summary: the attack-by-condition classification grid, the attack success
rate grid, the per-technique evasion grid with effectiveness tiers, and
the two figure-shaped CSVs (recall-at-k curves; retrieval degradation
versus evasion per technique). Cells that were never computed stay empty;
nothing is fabricated. All output is byte-deterministic for a given
evaluation dict.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from .taxonomy import Technique

ATTACK_ORDER = (
    "none",
    "synonym",
    "char_noise",
    "word_swap",
    "paraphrase",
    "persuasion_blind",
    "persuasion_oracle",
)
CONDITION_ORDER = ("claim_only", "gold_evidence")
POLICY_ORDER = ("blind_pooled", "oracle")

TIER_EFFECTIVE = "effective"
TIER_PARTIAL = "partially_effective"
TIER_NEUTRALISED = "neutralised"

EASR_TIER_THRESHOLD = 0.05


def assign_tier(
    easr_by_dataset: dict[str, float | None], threshold: float = EASR_TIER_THRESHOLD
) -> str | None:
    """Tier a technique by its gold-evidence evasion rate per dataset.

    Clearing the threshold in every dataset is effective, in at least one
    is partially effective, in none is neutralised. Any missing value
    makes the tier undeterminable (None).
    """
    values = list(easr_by_dataset.values())
    if not values or any(v is None for v in values):
        return None
    hits = sum(1 for v in values if v >= threshold)
    if hits == len(values):
        return TIER_EFFECTIVE
    if hits >= 1:
        return TIER_PARTIAL
    return TIER_NEUTRALISED


@dataclass
class ReportBundle:
    datasets: list[str]
    table1: list[dict]
    table3: list[dict]
    table4: list[dict]
    fig2: list[dict]
    fig3: list[dict]
    summary: str

    def files(self) -> dict[str, str]:
        """Rendered file name -> file content mapping."""
        table4_cols = []
        for ds in self.datasets:
            table4_cols.append(f"{ds}_claim_easr")
            table4_cols.append(f"{ds}_gold_easr")
        return {
            "table1.csv": _csv(
                ("dataset", "condition", "attack", "f1_macro", "roc_auc", "accuracy", "delta_acc", "n"),
                self.table1,
            ),
            "table3_asr.csv": _csv(
                ("dataset", "condition", "policy", "evasion_asr", "sabotage_asr"), self.table3
            ),
            "table4_techniques.csv": _csv(
                ("technique", "category", *table4_cols, "tier"),
                self.table4,
            ),
            "fig2_recall_at_k.csv": _csv(
                ("dataset", "attack", "k", "recall", "all_found", "n_claims"), self.fig2
            ),
            "fig3_retrieval_vs_classification.csv": _csv(
                ("technique", "delta_recall_at_5_abs", "evasion_asr_gold"), self.fig3
            ),
            "summary.txt": self.summary,
        }


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _csv(header: tuple[str, ...], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(row.get(col)) for col in header])
    return buf.getvalue()


def _cell(evaluation: dict, section: str, key: str) -> dict | None:
    return evaluation.get(section, {}).get(key)


def build_reports(evaluation: dict, techniques: list[Technique]) -> ReportBundle:
    """Assemble every report shape from the evaluation tables."""
    datasets = list(evaluation.get("datasets", []))
    tech_by_key = {t.key: t for t in techniques}

    table1 = []
    for ds in datasets:
        for cond in CONDITION_ORDER:
            for attack in ATTACK_ORDER:
                cell = _cell(evaluation, "classification", f"{ds}|{cond}|{attack}")
                if cell is None:
                    continue
                table1.append(
                    {
                        "dataset": ds,
                        "condition": cond,
                        "attack": attack,
                        "f1_macro": cell.get("f1"),
                        "roc_auc": cell.get("auc"),
                        "accuracy": cell.get("acc"),
                        "delta_acc": cell.get("delta_acc"),
                        "n": cell.get("n"),
                    }
                )

    table3 = []
    for ds in datasets:
        for cond in CONDITION_ORDER:
            for policy in POLICY_ORDER:
                cell = _cell(evaluation, "asr", f"{ds}|{cond}|{policy}")
                if cell is None:
                    continue
                table3.append(
                    {
                        "dataset": ds,
                        "condition": cond,
                        "policy": policy,
                        "evasion_asr": cell.get("evasion"),
                        "sabotage_asr": cell.get("sabotage"),
                    }
                )

    table4 = []
    easr = evaluation.get("technique_easr", {})
    for technique in sorted(techniques, key=lambda t: t.ordinal):
        if not technique.included:
            continue
        row: dict = {"technique": technique.name, "category": technique.category}
        gold_by_ds: dict[str, float | None] = {}
        any_value = False
        for ds in datasets:
            claim_v = easr.get(f"{ds}|claim_only|{technique.key}")
            gold_v = easr.get(f"{ds}|gold_evidence|{technique.key}")
            row[f"{ds}_claim_easr"] = claim_v
            row[f"{ds}_gold_easr"] = gold_v
            gold_by_ds[ds] = gold_v
            any_value = any_value or claim_v is not None or gold_v is not None
        if not any_value:
            continue
        row["tier"] = assign_tier(gold_by_ds)
        table4.append(row)

    fig2 = []
    retrieval = evaluation.get("retrieval", {})
    for ds in datasets:
        for attack in (*ATTACK_ORDER, *(f"technique:{t.key}" for t in techniques)):
            cell = retrieval.get(f"{ds}|{attack}")
            if cell is None:
                continue
            for k in sorted(int(x) for x in cell.get("recall", {})):
                fig2.append(
                    {
                        "dataset": ds,
                        "attack": attack,
                        "k": k,
                        "recall": cell["recall"][str(k)],
                        "all_found": cell.get("all_found", {}).get(str(k)),
                        "n_claims": cell.get("n"),
                    }
                )

    fig3 = []
    for technique in sorted(techniques, key=lambda t: t.ordinal):
        if not technique.included:
            continue
        deltas = []
        easrs = []
        for ds in datasets:
            base = retrieval.get(f"{ds}|none")
            mine = retrieval.get(f"{ds}|technique:{technique.key}")
            gold_v = easr.get(f"{ds}|gold_evidence|{technique.key}")
            if base is None or mine is None or gold_v is None:
                continue
            base5 = base.get("recall", {}).get("5")
            mine5 = mine.get("recall", {}).get("5")
            if base5 is None or mine5 is None:
                continue
            deltas.append(abs(mine5 - base5))
            easrs.append(gold_v)
        if deltas and easrs:
            fig3.append(
                {
                    "technique": technique.name,
                    "delta_recall_at_5_abs": sum(deltas) / len(deltas),
                    "evasion_asr_gold": sum(easrs) / len(easrs),
                }
            )

    summary = _summary(evaluation, table4, tech_by_key)
    return ReportBundle(
        datasets=datasets,
        table1=table1,
        table3=table3,
        table4=table4,
        fig2=fig2,
        fig3=fig3,
        summary=summary,
    )


def _summary(evaluation: dict, table4: list[dict], tech_by_key: dict[str, Technique]) -> str:
    lines = []
    provenance = evaluation.get("provenance", {})
    lines.append("attack evaluation summary")
    lines.append("=========================")
    for key in sorted(provenance):
        lines.append(f"{key}: {provenance[key]}")
    lines.append("")
    lines.append(
        "note: oracle rows score the per-claim selected variant only; the pooled"
    )
    lines.append(
        "variant set enters the blind rows. Undefined cells are left empty."
    )
    lines.append("")
    coverage = evaluation.get("coverage", {})
    if coverage:
        lines.append("coverage")
        lines.append("--------")
        for key in sorted(coverage):
            lines.append(f"{key}: {coverage[key]}")
        lines.append("")
    if table4:
        lines.append("technique tiers (gold-evidence evasion threshold "
                     f"{EASR_TIER_THRESHOLD:.2f})")
        lines.append("-----------------")
        for row in table4:
            tier = row.get("tier") or "undetermined"
            lines.append(f"{row['technique']}: {tier}")
        lines.append("")
    return "\n".join(lines) + "\n"


def write_reports(bundle: ReportBundle, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, content in bundle.files().items():
        path = out / name
        path.write_text(content, encoding="utf-8")
        written.append(path)
    return written


def render_plots(bundle: ReportBundle, out_dir: str | Path) -> list[Path]:
    """Optional static plot rendering; needs matplotlib installed."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    by_ds_attack: dict[tuple[str, str], list[tuple[int, float]]] = {}
    for row in bundle.fig2:
        if row["attack"].startswith("technique:"):
            continue
        by_ds_attack.setdefault((row["dataset"], row["attack"]), []).append(
            (row["k"], row["recall"])
        )
    datasets = sorted({ds for ds, _ in by_ds_attack})
    if datasets:
        fig, axes = plt.subplots(1, len(datasets), figsize=(6 * len(datasets), 4), squeeze=False)
        for ax, ds in zip(axes[0], datasets):
            for (row_ds, attack), points in sorted(by_ds_attack.items()):
                if row_ds != ds:
                    continue
                points = sorted(points)
                ax.plot([k for k, _ in points], [r for _, r in points], marker="o", label=attack)
            ax.set_title(ds)
            ax.set_xlabel("k")
            ax.set_ylabel("recall@k")
            ax.legend(fontsize=7)
        path = out / "fig2_recall_at_k.png"
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    if bundle.fig3:
        fig, ax = plt.subplots(figsize=(6, 5))
        for row in bundle.fig3:
            ax.scatter(row["delta_recall_at_5_abs"], row["evasion_asr_gold"], s=18)
            ax.annotate(row["technique"], (row["delta_recall_at_5_abs"], row["evasion_asr_gold"]),
                        fontsize=6)
        ax.set_xlabel("|delta recall@5|")
        ax.set_ylabel("gold-evidence evasion ASR")
        path = out / "fig3_retrieval_vs_classification.png"
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written
