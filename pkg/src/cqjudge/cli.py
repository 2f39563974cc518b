"""Command-line entry point: ingest, analyze, features, train, evaluate,
predict, export, prompt, llm-classify.

Exit codes: 0 success, 1 usage error, 2 data error, 3 remote/IO error.
Configuration is logged to stderr; results go to files or stdout only,
so identical invocations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import requests

from . import analysis, llm, pipeline
from .classifiers import DtcConfig, RfcConfig, SvcConfig
from .corpus import (
    SchemaConfig,
    labeled_only,
    load_schema_presets,
    parse_corpus_file,
    read_jsonl_file,
    write_jsonl,
    write_row_errors,
)
from .errors import CqjudgeError, LlmError
from .features import TypingRules, extract_features, load_templates
from .pipeline import EvalReport, SplitSpec, load_model_file, save_model_file, train_bundle
from .synthetic import default_lexicon
from .textcore import SentimentLexicon
from .tfidf import TfidfConfig


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 instead of argparse's 2
        raise UsageError(f"{self.prog}: {message}")


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _write_text(out: str | None, text: str) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _write_bytes(out: str, data: bytes) -> None:
    Path(out).write_bytes(data)


def _load_config_file(path: str) -> dict:
    """Flat key = value file; strings may be quoted, # starts a comment."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if value.startswith(('"', "'")) and value.endswith(value[0]) and len(value) >= 2:
            parsed: object = value[1:-1]
        elif value.lower() in ("true", "false"):
            parsed = value.lower() == "true"
        else:
            try:
                parsed = int(value)
            except ValueError:
                try:
                    parsed = float(value)
                except ValueError:
                    parsed = value
        values[key] = parsed
    return values


def _resources(ns) -> tuple[SentimentLexicon, list, TypingRules]:
    lexicon = (
        SentimentLexicon.from_file(ns.lexicon) if getattr(ns, "lexicon", None) else default_lexicon()
    )
    templates = load_templates(getattr(ns, "templates", None))
    return lexicon, templates, TypingRules.from_templates(templates)


def _corpus(ns):
    return read_jsonl_file(ns.corpus)


def _featurize(records, lexicon, templates, rules):
    return [extract_features(r, lexicon, templates, rules) for r in records]


# --- verb handlers -----------------------------------------------------------


def _cmd_ingest(ns) -> int:
    presets = load_schema_presets()
    if ns.schema in presets:
        schema = presets[ns.schema]
    elif Path(ns.schema).exists():
        schema = SchemaConfig.from_dict(json.loads(Path(ns.schema).read_text(encoding="utf-8")))
    else:
        raise UsageError(
            f"unknown schema {ns.schema!r}; expected one of {sorted(presets)} or a JSON file"
        )
    records, errors = parse_corpus_file(ns.input, schema)
    _write_bytes(ns.out, write_jsonl(records))
    errors_path = ns.errors or f"{ns.input}.errors.tsv"
    if errors:
        write_row_errors(errors_path, errors)
    _log(
        f"cqjudge ingest: {len(records)} records -> {ns.out}; "
        f"{len(errors)} rows skipped" + (f" -> {errors_path}" if errors else "")
    )
    return 0


def _render(table, fmt: str) -> str:
    if fmt == "json":
        return analysis.report_to_json(table)
    if fmt == "csv":
        return table.to_csv()
    return table.to_markdown()


def _format_for(ns) -> str:
    if ns.format:
        return ns.format
    if ns.out:
        suffix = Path(ns.out).suffix.lower()
        if suffix == ".json":
            return "json"
        if suffix == ".csv":
            return "csv"
    return "md"


def _cmd_analyze(ns) -> int:
    lexicon, templates, rules = _resources(ns)
    records = labeled_only(_corpus(ns))
    if ns.what == "templates":
        table = analysis.template_usefulness(records, templates)
    else:
        features = _featurize(records, lexicon, templates, rules)
        if ns.what == "rates":
            table = analysis.usefulness_rates(records, features, ns.group)
        else:
            table = analysis.correlate(features, [r.label for r in records])
    _write_text(ns.out, _render(table, _format_for(ns)))
    _log(f"cqjudge analyze {ns.what}: {len(records)} labeled records")
    return 0


def _cmd_features(ns) -> int:
    lexicon, templates, rules = _resources(ns)
    records = _corpus(ns)
    lines = []
    for record in records:
        feats = extract_features(record, lexicon, templates, rules)
        lines.append(json.dumps({"id": record.id, **feats.to_dict()}, ensure_ascii=False, sort_keys=True))
    _write_text(ns.out, "\n".join(lines) + ("\n" if lines else ""))
    _log(f"cqjudge features: {len(records)} records")
    return 0


def _model_config(ns):
    if ns.model == "dtc":
        return DtcConfig(max_depth=ns.max_depth, min_samples_split=ns.min_samples_split)
    if ns.model == "rfc":
        return RfcConfig(
            n_trees=ns.trees,
            bootstrap=not ns.no_bootstrap,
            features_per_split=ns.features_per_split,
            max_depth=ns.max_depth,
            min_samples_split=ns.min_samples_split,
            seed=ns.seed,
        )
    return SvcConfig(C=ns.svc_c, tol=ns.tol, max_iter=ns.max_iter)


def _cmd_train(ns) -> int:
    lexicon, templates, rules = _resources(ns)
    records = _corpus(ns)
    mode = "enr" if ns.enrich else "org"
    bundle = train_bundle(
        records,
        ns.model,
        mode,
        lexicon=lexicon,
        templates=templates,
        typing_rules=rules,
        split_spec=SplitSpec(train_fraction=ns.fraction, seed=ns.seed),
        tfidf_config=TfidfConfig(min_df=ns.min_df, sublinear_tf=ns.sublinear_tf),
        model_config=_model_config(ns),
    )
    save_model_file(ns.out, bundle)
    _log(f"cqjudge train: {ns.model}/{mode} seed={ns.seed} -> {ns.out}")
    return 0


def _improvement_markdown(baseline: EvalReport, report: EvalReport, pct: float) -> str:
    return (
        "| model | mode | macro F1 | impr. |\n"
        "| --- | --- | --- | --- |\n"
        f"| {baseline.model} | {baseline.mode}. | {baseline.macro['f1']:.4f} | - |\n"
        f"| {report.model} | {report.mode}. | {report.macro['f1']:.4f} | {pct:.1f}% |\n"
    )


def _cmd_evaluate(ns) -> int:
    bundle = load_model_file(ns.model_file)
    records = _corpus(ns)
    report = pipeline.evaluate(bundle, records)
    markdown = None
    if ns.baseline:
        baseline = EvalReport.from_json_dict(
            json.loads(Path(ns.baseline).read_text(encoding="utf-8"))
        )
        pct = pipeline.improvement(baseline, report)
        report = dataclasses.replace(
            report,
            improvement_pct=pct,
            baseline=f"{baseline.model}:{baseline.mode}:seed={baseline.seed}",
        )
        markdown = _improvement_markdown(baseline, report, pct)
    _write_text(ns.out, report.to_json())
    if ns.markdown:
        if markdown is None:
            markdown = (
                "| model | mode | macro F1 | impr. |\n| --- | --- | --- | --- |\n"
                f"| {report.model} | {report.mode}. | {report.macro['f1']:.4f} | - |\n"
            )
        _write_text(ns.markdown, markdown)
    _log(
        f"cqjudge evaluate: {report.model}/{report.mode} macro-F1 {report.macro['f1']:.4f} "
        f"on {report.n_test} test records"
    )
    return 0


def _cmd_predict(ns) -> int:
    bundle = load_model_file(ns.model_file)
    records = _corpus(ns)
    lines = []
    for record_id, label, scores in pipeline.predict_records(bundle, records):
        lines.append(
            json.dumps(
                {"id": record_id, "label": label.text, "scores": scores},
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    _write_text(ns.out, "\n".join(lines) + ("\n" if lines else ""))
    _log(f"cqjudge predict: {len(records)} records with {bundle.kind}/{bundle.mode}")
    return 0


def _cmd_export(ns) -> int:
    lexicon, templates, rules = _resources(ns)
    records = labeled_only(_corpus(ns))
    features = _featurize(records, lexicon, templates, rules)
    mode = "enr" if ns.enrich else "org"
    _write_bytes(ns.out, pipeline.export_for_neural(records, features, mode))
    _log(f"cqjudge export: {len(records)} labeled records ({mode}) -> {ns.out}")
    return 0


def _cmd_prompt(ns) -> int:
    lexicon, templates, rules = _resources(ns)
    records = _corpus(ns)
    if ns.id:
        matches = [r for r in records if r.id == ns.id]
        if not matches:
            raise CqjudgeError(f"no record with id {ns.id!r}")
        record = matches[0]
    else:
        record = records[ns.index]
    features = extract_features(record, lexicon, templates, rules) if ns.enrich else None
    pair = llm.build_prompt(record, enrich=ns.enrich, features=features)
    _write_text(ns.out, f"[system]\n{pair.system}\n\n[user]\n{pair.user}\n")
    return 0


def _cmd_llm_classify(ns) -> int:
    lexicon, templates, rules = _resources(ns)
    records = _corpus(ns)
    if ns.limit:
        records = records[: ns.limit]
    config = llm.EndpointConfig.from_env(
        base_url=ns.endpoint, max_retries=ns.max_retries, timeout=ns.timeout
    )
    features = _featurize(records, lexicon, templates, rules) if ns.enrich else None
    results = llm.classify_batch(records, ns.enrich, features, config, ns.max_in_flight)
    lines = [json.dumps(r, ensure_ascii=False, sort_keys=True) for r in results]
    _write_text(ns.out, "\n".join(lines) + ("\n" if lines else ""))
    parsed = sum(1 for r in results if r["label"] is not None)
    _log(f"cqjudge llm-classify: {parsed}/{len(results)} replies parsed")
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="cqjudge", description=__doc__)
    parser.add_argument("--config", help="key = value defaults file; flags override")
    sub = parser.add_subparsers(dest="verb", metavar="verb")

    def common(p, corpus=True):
        if corpus:
            p.add_argument("--corpus", required=True, help="canonical JSONL corpus")
        p.add_argument("--lexicon", help="sentiment lexicon TSV (bundled default)")
        p.add_argument("--templates", help="template registry TSV (bundled default)")

    p = sub.add_parser("ingest", help="TSV -> canonical JSONL")
    p.add_argument("--input", required=True, help="source TSV file")
    p.add_argument("--schema", required=True, help="preset name or schema JSON path")
    p.add_argument("--out", required=True, help="output JSONL path")
    p.add_argument("--errors", help="row-errors sidecar (default <input>.errors.tsv)")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("analyze", help="usefulness rate / correlation tables")
    p.add_argument("what", choices=("rates", "templates", "correlation"))
    common(p)
    p.add_argument("--group", choices=analysis.GROUP_KEYS, default="template_id")
    p.add_argument("--format", choices=("md", "json", "csv"))
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("features", help="per-record feature vectors as JSONL")
    common(p)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("train", help="train a classifier bundle")
    common(p)
    p.add_argument("--model", choices=("dtc", "rfc", "svc"), required=True)
    p.add_argument("--enrich", action="store_true", help="append the 4 feature dims")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fraction", type=float, default=0.8, help="train fraction")
    p.add_argument("--min-df", type=int, default=1)
    p.add_argument("--sublinear-tf", action="store_true")
    p.add_argument("--trees", type=int, default=100, help="rfc: number of trees")
    p.add_argument("--no-bootstrap", action="store_true", help="rfc: disable bagging")
    p.add_argument("--features-per-split", type=int, help="rfc: default ceil(sqrt(dim))")
    p.add_argument("--max-depth", type=int, help="dtc/rfc: depth limit")
    p.add_argument("--min-samples-split", type=int, default=2)
    p.add_argument("--svc-c", type=float, default=1.0, help="svc: C")
    p.add_argument("--tol", type=float, default=1e-4, help="svc: stop tolerance")
    p.add_argument("--max-iter", type=int, default=1000, help="svc: epoch cap")
    p.add_argument("--out", required=True, help="bundle output path (.cqj)")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="score a bundle on its corpus")
    common(p)
    p.add_argument("--model-file", required=True, help="bundle path")
    p.add_argument("--baseline", help="metrics JSON to compute improvement against")
    p.add_argument("--markdown", help="also write a small org/enr markdown table")
    p.add_argument("--out", help="metrics JSON output (default stdout)")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("predict", help="label records with a bundle")
    common(p)
    p.add_argument("--model-file", required=True)
    p.add_argument("--out", help="predictions JSONL (default stdout)")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("export", help="neural-harness JSONL export")
    common(p)
    p.add_argument("--enrich", action="store_true", help="include enriched_text")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("prompt", help="print the remote-classification prompt")
    common(p)
    p.add_argument("--id", help="record id (default: --index)")
    p.add_argument("--index", type=int, default=0, help="record position, 0-based")
    p.add_argument("--enrich", action="store_true")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=_cmd_prompt)

    p = sub.add_parser("llm-classify", help="classify via a chat endpoint")
    common(p)
    p.add_argument("--endpoint", help="chat URL (default env CQJ_LLM_ENDPOINT)")
    p.add_argument("--enrich", action="store_true")
    p.add_argument("--limit", type=int, help="only the first N records")
    p.add_argument("--max-retries", type=int, default=3)
    p.add_argument("--timeout", type=float, default=30.0)
    p.add_argument("--max-in-flight", type=int, default=4)
    p.add_argument("--out", help="results JSONL (default stdout)")
    p.set_defaults(func=_cmd_llm_classify)

    parser.verb_parsers = dict(sub.choices)
    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    # pre-scan for --config; file values become parser defaults so that
    # explicit flags still win, and subparsers see them too (a subcommand
    # parses into a fresh namespace, so seeding the outer one is not enough)
    if "--config" in argv:
        config_path = argv[argv.index("--config") + 1 : argv.index("--config") + 2]
        if not config_path:
            raise UsageError("--config requires a path")
        config = _load_config_file(config_path[0])
        config.pop("func", None)
        config.pop("verb", None)
        if config:
            parser.set_defaults(**config)
            for sp in parser.verb_parsers.values():
                sp.set_defaults(**config)
    ns = parser.parse_args(argv)
    if not getattr(ns, "verb", None):
        parser.print_usage(sys.stderr)
        return 1
    return ns.func(ns)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return run(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    except (LlmError, requests.RequestException, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (CqjudgeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
