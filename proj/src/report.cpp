// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>

#include "json.hpp"
#include "prego/detection.hpp"
#include "prego/version.hpp"

namespace prego {

namespace {

using json = nlohmann::ordered_json;

json counts_to_json(const ConfusionCounts& c) {
    json obj;
    obj["tp"] = c.tp;
    obj["fp"] = c.fp;
    obj["tn"] = c.tn;
    obj["fn"] = c.fn;
    obj["precision"] = precision(c);
    obj["recall"] = recall(c);
    obj["f1"] = f1(c);
    obj["balanced_accuracy"] = balanced_accuracy(c);
    return obj;
}

json verdict_to_json(const StepVerdict& v) {
    json obj;
    obj["step"] = v.step_index;
    obj["recognized"] = v.recognized;
    switch (v.anticipated.kind) {
        case AnticipatorVerdict::Kind::Label:
            obj["anticipated"] = v.anticipated.label;
            break;
        case AnticipatorVerdict::Kind::AllowedSet:
            obj["anticipated"] = v.anticipated.allowed;
            break;
        case AnticipatorVerdict::Kind::NoPrediction:
            obj["anticipated"] = nullptr;
            break;
    }
    obj["flagged"] = v.flagged_mistake;
    obj["span"] = json::array({v.span_start, v.span_end});
    return obj;
}

}  // namespace

std::string detection_report_to_json(const DetectionReport& report, const RunManifest& manifest) {
    json doc;
    doc["schema_version"] = kReportSchemaVersion;

    json mf;
    mf["artifact_version"] = manifest.artifact_version;
    mf["command_line"] = manifest.command_line;
    mf["timestamp"] = manifest.timestamp;
    mf["seed"] = manifest.seed;
    json cfg = json::object();
    for (const auto& [key, value] : manifest.config) cfg[key] = value;
    mf["config"] = std::move(cfg);
    doc["manifest"] = std::move(mf);

    doc["train_videos"] = report.train_videos;
    doc["test_videos"] = report.test_videos;
    doc["sequence_level"] = counts_to_json(report.sequence_total);
    doc["frame_level"] = counts_to_json(report.frame_total);

    doc["procedures"] = json::array();
    for (const ProcedureResult& r : report.procedures) {
        json proc;
        proc["video_id"] = r.video_id;
        proc["task_id"] = r.task_id;
        proc["sequence_counts"] = counts_to_json(r.sequence_counts);
        proc["frame_counts"] = counts_to_json(r.frame_counts);
        proc["steps"] = json::array();
        for (const StepVerdict& v : r.verdicts) proc["steps"].push_back(verdict_to_json(v));
        doc["procedures"].push_back(std::move(proc));
    }

    if (!report.latency.empty()) {
        json lat = json::object();
        for (const auto& [scheme, s] : report.latency) {
            json row;
            row["count"] = s.count;
            row["mean_s"] = s.mean_s;
            row["p50_s"] = s.p50_s;
            row["p95_s"] = s.p95_s;
            lat[scheme] = std::move(row);
        }
        doc["latency"] = std::move(lat);
    }

    doc["notes"] = json::array(
        {"correct procedures are scored per step: every unflagged step is a true negative, "
         "every flagged step a false positive"});

    return doc.dump(2) + "\n";
}

std::string render_report_table(const DetectionReport& report) {
    char line[256];
    std::string out;
    out += "level           tp       fp       tn       fn  precision   recall       f1  bal_acc\n";
    const auto row = [&](const char* name, const ConfusionCounts& c) {
        std::snprintf(line, sizeof(line),
                      "%-8s %9lld %8lld %8lld %8lld   %8.4f %8.4f %8.4f %8.4f\n", name,
                      static_cast<long long>(c.tp), static_cast<long long>(c.fp),
                      static_cast<long long>(c.tn), static_cast<long long>(c.fn), precision(c),
                      recall(c), f1(c), balanced_accuracy(c));
        out += line;
    };
    row("sequence", report.sequence_total);
    row("frame", report.frame_total);

    if (!report.latency.empty()) {
        out += "\nlatency per sample (s):\n";
        for (const auto& [scheme, s] : report.latency) {
            std::snprintf(line, sizeof(line), "  %-6s n=%-6zu mean=%.4f p50=%.4f p95=%.4f\n",
                          scheme.c_str(), s.count, s.mean_s, s.p50_s, s.p95_s);
            out += line;
        }
    }
    return out;
}

}  // namespace prego
