// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#include "prego/dataset.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "prego/io_util.hpp"

namespace prego {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void load_fail(const std::filesystem::path& path, int line, const std::string& msg) {
    throw LoadError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

std::vector<LabelId> parse_label_array(const json& arr, const std::filesystem::path& path,
                                       int line, const char* field) {
    if (!arr.is_array()) {
        load_fail(path, line, std::string(field) + " must be an array of integers");
    }
    std::vector<LabelId> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number_integer()) {
            load_fail(path, line, std::string(field) + " must contain only integers");
        }
        out.push_back(v.get<LabelId>());
    }
    return out;
}

const std::set<std::string> kVideoKeys = {"video_id",    "task_id",           "fps",
                                          "recognizer_labels", "gt_labels",
                                          "first_mistake_frame", "mistake_category",
                                          "split_hint"};

VideoRecord parse_video_line(const json& obj, const std::filesystem::path& path, int line) {
    if (!obj.is_object()) load_fail(path, line, "expected a JSON object");
    for (const auto& [key, _] : obj.items()) {
        if (!kVideoKeys.count(key)) load_fail(path, line, "unknown field '" + key + "'");
    }
    for (const char* required :
         {"video_id", "task_id", "fps", "recognizer_labels", "gt_labels"}) {
        if (!obj.contains(required)) {
            load_fail(path, line, std::string("missing field '") + required + "'");
        }
    }

    VideoRecord rec;
    if (!obj["video_id"].is_string()) load_fail(path, line, "video_id must be a string");
    rec.video_id = obj["video_id"].get<std::string>();
    if (!obj["task_id"].is_string()) load_fail(path, line, "task_id must be a string");
    rec.task_id = obj["task_id"].get<std::string>();
    if (!obj["fps"].is_number()) load_fail(path, line, "fps must be a number");
    rec.fps = obj["fps"].get<double>();

    rec.recognizer_labels.video_id = rec.video_id;
    rec.recognizer_labels.fps = rec.fps;
    rec.recognizer_labels.labels =
        parse_label_array(obj["recognizer_labels"], path, line, "recognizer_labels");
    rec.gt_labels.video_id = rec.video_id;
    rec.gt_labels.fps = rec.fps;
    rec.gt_labels.labels = parse_label_array(obj["gt_labels"], path, line, "gt_labels");

    if (obj.contains("first_mistake_frame") && !obj["first_mistake_frame"].is_null()) {
        if (!obj["first_mistake_frame"].is_number_integer()) {
            load_fail(path, line, "first_mistake_frame must be an integer or null");
        }
        rec.annotation.first_mistake_frame = obj["first_mistake_frame"].get<int>();
    }
    if (obj.contains("mistake_category") && !obj["mistake_category"].is_null()) {
        if (!obj["mistake_category"].is_string()) {
            load_fail(path, line, "mistake_category must be a string or null");
        }
        rec.annotation.category = obj["mistake_category"].get<std::string>();
    }
    if (obj.contains("split_hint") && !obj["split_hint"].is_null()) {
        if (!obj["split_hint"].is_string()) {
            load_fail(path, line, "split_hint must be a string or null");
        }
        rec.split_hint = obj["split_hint"].get<std::string>();
    }
    return rec;
}

void validate_record(const VideoRecord& rec, const ActionVocabulary& vocab,
                     const std::filesystem::path& path, int line) {
    if (!(rec.fps > 0.0)) load_fail(path, line, "video '" + rec.video_id + "': fps must be > 0");
    if (rec.gt_labels.labels.empty()) {
        load_fail(path, line, "video '" + rec.video_id + "': empty label streams");
    }
    if (rec.recognizer_labels.labels.size() != rec.gt_labels.labels.size()) {
        load_fail(path, line,
                  "video '" + rec.video_id + "': recognizer stream has " +
                      std::to_string(rec.recognizer_labels.labels.size()) +
                      " frames but gt stream has " + std::to_string(rec.gt_labels.labels.size()));
    }
    for (const FrameStream* s : {&rec.recognizer_labels, &rec.gt_labels}) {
        for (LabelId l : s->labels) {
            if (!vocab.contains(l)) {
                load_fail(path, line,
                          "video '" + rec.video_id + "': unknown label " + std::to_string(l));
            }
        }
    }
    if (rec.annotation.first_mistake_frame) {
        const int f = *rec.annotation.first_mistake_frame;
        if (f < 0 || f >= rec.length()) {
            load_fail(path, line,
                      "video '" + rec.video_id + "': first_mistake_frame " + std::to_string(f) +
                          " outside stream of length " + std::to_string(rec.length()));
        }
    }
    if (rec.annotation.category && !is_known_category(*rec.annotation.category)) {
        load_fail(path, line,
                  "video '" + rec.video_id + "': unknown mistake category '" +
                      *rec.annotation.category + "'");
    }
    if (rec.split_hint && *rec.split_hint != "train" && *rec.split_hint != "test") {
        load_fail(path, line,
                  "video '" + rec.video_id + "': split_hint must be 'train' or 'test'");
    }
}

json record_to_json(const VideoRecord& rec) {
    json obj;
    obj["video_id"] = rec.video_id;
    obj["task_id"] = rec.task_id;
    obj["fps"] = rec.fps;
    obj["recognizer_labels"] = rec.recognizer_labels.labels;
    obj["gt_labels"] = rec.gt_labels.labels;
    if (rec.annotation.first_mistake_frame) {
        obj["first_mistake_frame"] = *rec.annotation.first_mistake_frame;
    } else {
        obj["first_mistake_frame"] = nullptr;
    }
    if (rec.annotation.category) {
        obj["mistake_category"] = *rec.annotation.category;
    } else {
        obj["mistake_category"] = nullptr;
    }
    if (rec.split_hint) obj["split_hint"] = *rec.split_hint;
    return obj;
}

}  // namespace

std::filesystem::path default_vocab_path(const std::filesystem::path& dataset_path) {
    std::filesystem::path p = dataset_path;
    p.replace_extension(".vocab.json");
    return p;
}

Dataset load_dataset(const std::filesystem::path& dataset_path,
                     const std::filesystem::path& vocab_path) {
    Dataset ds;

    json vocab_doc;
    try {
        vocab_doc = json::parse(read_file(vocab_path));
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(vocab_path.string() + ": invalid JSON: " + e.what());
    }
    if (!vocab_doc.is_object() || !vocab_doc.contains("labels") ||
        !vocab_doc["labels"].is_array()) {
        throw LoadError(vocab_path.string() + ": expected {\"labels\": [...]}");
    }
    std::vector<VocabEntry> entries;
    for (const auto& item : vocab_doc["labels"]) {
        if (!item.is_object() || !item.contains("id") || !item.contains("name") ||
            !item.contains("verb") || !item.contains("noun")) {
            throw LoadError(vocab_path.string() +
                            ": each label needs id, name, verb and noun fields");
        }
        entries.push_back({item["id"].get<LabelId>(), item["name"].get<std::string>(),
                           item["verb"].get<std::string>(), item["noun"].get<std::string>()});
    }
    try {
        ds.vocab = ActionVocabulary(std::move(entries));
    } catch (const InvalidInputError& e) {
        throw LoadError(vocab_path.string() + ": " + e.what());
    }

    std::istringstream in(read_file(dataset_path));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            load_fail(dataset_path, line_no, std::string("invalid JSON: ") + e.what());
        }
        VideoRecord rec = parse_video_line(obj, dataset_path, line_no);
        validate_record(rec, ds.vocab, dataset_path, line_no);
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

Dataset load_dataset(const std::filesystem::path& dataset_path) {
    return load_dataset(dataset_path, default_vocab_path(dataset_path));
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dataset_path,
                  const std::filesystem::path& vocab_path) {
    json vocab_doc;
    vocab_doc["labels"] = json::array();
    for (const VocabEntry& e : dataset.vocab.entries()) {
        json item;
        item["id"] = e.id;
        item["name"] = e.name;
        item["verb"] = e.verb;
        item["noun"] = e.noun;
        vocab_doc["labels"].push_back(std::move(item));
    }
    write_file_atomic(vocab_path, vocab_doc.dump(2) + "\n");

    std::string lines;
    for (const VideoRecord& rec : dataset.records) {
        lines += record_to_json(rec).dump();
        lines += '\n';
    }
    write_file_atomic(dataset_path, lines);
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dataset_path) {
    save_dataset(dataset, dataset_path, default_vocab_path(dataset_path));
}

VideoRecord trim_to_first_mistake(const VideoRecord& record) {
    if (!record.annotation.first_mistake_frame) return record;
    const int mistake_frame = *record.annotation.first_mistake_frame;
    const ActionSequence gt_steps = segment_from_frames(record.gt_labels);
    int cut = record.length();
    for (const ActionSegment& s : gt_steps.segments) {
        if (mistake_frame >= s.start && mistake_frame < s.end) {
            cut = s.end;
            break;
        }
    }
    VideoRecord out = record;
    out.recognizer_labels.labels.resize(static_cast<std::size_t>(cut));
    out.gt_labels.labels.resize(static_cast<std::size_t>(cut));
    return out;
}

OccSplit build_occ_split(const std::vector<VideoRecord>& records) {
    OccSplit split;
    for (const VideoRecord& rec : records) {
        bool to_test;
        if (rec.split_hint) {
            to_test = (*rec.split_hint == "test");
        } else {
            to_test = is_procedural_mistake(rec.annotation);
        }
        if (to_test) {
            split.test.push_back(is_procedural_mistake(rec.annotation) ? trim_to_first_mistake(rec)
                                                                       : rec);
        } else {
            split.train.push_back(rec);
        }
    }
    return split;
}

const char* mistake_kind_name(MistakeKind k) {
    switch (k) {
        case MistakeKind::SwapAdjacent: return "swap_adjacent";
        case MistakeKind::OmitStep: return "omit_step";
        case MistakeKind::InsertForeign: return "insert_foreign";
    }
    return "?";
}

void validate_spec(const SyntheticSpec& spec) {
    if (spec.vocab_size < 3) throw InvalidInputError("vocab_size must be >= 3");
    if (spec.grammar.empty()) throw InvalidInputError("grammar must define at least one task");
    for (const TaskGrammar& task : spec.grammar) {
        if (task.sequences.empty()) {
            throw InvalidInputError("task '" + task.task_id + "' has no sequences");
        }
        for (const auto& seq : task.sequences) {
            if (seq.empty()) {
                throw InvalidInputError("task '" + task.task_id + "' has an empty sequence");
            }
            for (std::size_t i = 0; i < seq.size(); ++i) {
                if (seq[i] < 0 || seq[i] >= spec.vocab_size) {
                    throw InvalidInputError("task '" + task.task_id + "' uses label " +
                                            std::to_string(seq[i]) + " outside the vocabulary");
                }
                if (i > 0 && seq[i] == seq[i - 1]) {
                    throw InvalidInputError("task '" + task.task_id +
                                            "' repeats a label on adjacent steps");
                }
            }
        }
    }
    if (!(spec.mean_segment_frames >= 1.0)) {
        throw InvalidInputError("mean_segment_frames must be >= 1");
    }
    if (spec.segment_spread < 0.0) throw InvalidInputError("segment_spread must be >= 0");
    if (!(spec.noise_rate >= 0.0 && spec.noise_rate < 1.0)) {
        throw InvalidInputError("noise_rate must be in [0, 1)");
    }
    if (!(spec.fps > 0.0)) throw InvalidInputError("fps must be > 0");
}

SyntheticSpec default_synthetic_spec() {
    SyntheticSpec spec;
    spec.vocab_size = 10;
    spec.grammar = {
        {"toy_a", {{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {0, 1, 2, 4, 3, 5, 6, 7, 8, 9}}},
        {"toy_b", {{9, 8, 7, 6, 5, 4, 3, 2, 1, 0}, {9, 8, 7, 5, 6, 4, 3, 2, 1, 0}}},
    };
    return spec;
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(path.string() + ": invalid JSON: " + e.what());
    }
    SyntheticSpec spec = default_synthetic_spec();
    if (doc.contains("vocab_size")) spec.vocab_size = doc["vocab_size"].get<int>();
    if (doc.contains("tasks")) {
        spec.grammar.clear();
        for (const auto& t : doc["tasks"]) {
            TaskGrammar g;
            g.task_id = t.at("task_id").get<std::string>();
            for (const auto& s : t.at("sequences")) {
                g.sequences.push_back(s.get<std::vector<LabelId>>());
            }
            spec.grammar.push_back(std::move(g));
        }
    }
    if (doc.contains("mean_segment_frames")) {
        spec.mean_segment_frames = doc["mean_segment_frames"].get<double>();
    }
    if (doc.contains("segment_spread")) spec.segment_spread = doc["segment_spread"].get<double>();
    if (doc.contains("noise_rate")) spec.noise_rate = doc["noise_rate"].get<double>();
    if (doc.contains("mistake_kind")) {
        const std::string kind = doc["mistake_kind"].get<std::string>();
        if (kind == "swap_adjacent") {
            spec.mistake_kind = MistakeKind::SwapAdjacent;
        } else if (kind == "omit_step") {
            spec.mistake_kind = MistakeKind::OmitStep;
        } else if (kind == "insert_foreign") {
            spec.mistake_kind = MistakeKind::InsertForeign;
        } else {
            throw LoadError(path.string() + ": unknown mistake_kind '" + kind + "'");
        }
    }
    if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("fps")) spec.fps = doc["fps"].get<double>();
    validate_spec(spec);
    return spec;
}

namespace {

// Draws derived directly from the engine output so that a seed reproduces
// the same dataset on any standard library.
std::uint64_t next_below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

const char* kVerbs[] = {"attach", "insert", "screw", "align", "place", "slide", "press", "flip"};
const char* kNouns[] = {"wheel", "cabin",  "body", "track", "blade", "figurine", "chassis",
                        "roof",  "panel",  "axle", "frame", "door",  "bumper",   "engine",
                        "seat",  "mirror"};

ActionVocabulary synthetic_vocabulary(int size) {
    std::vector<VocabEntry> entries;
    entries.reserve(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) {
        const std::string verb = kVerbs[i % 8];
        std::string noun = kNouns[i % 16];
        if (i >= 16) noun += "_" + std::to_string(i / 16);
        entries.push_back({i, verb + "-" + noun, verb, noun});
    }
    return ActionVocabulary(std::move(entries));
}

struct InjectedMistake {
    std::vector<LabelId> steps;
    int first_bad_step{};
    std::string category;
};

// Keeps the step sequence free of adjacent duplicates so steps survive
// run-length collapsing unchanged.
InjectedMistake inject_mistake(const std::vector<LabelId>& steps, MistakeKind kind, int vocab_size,
                               std::mt19937_64& rng) {
    const int k = static_cast<int>(steps.size());
    auto pick_order = [&rng](int n) {
        std::vector<int> idx(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
        for (int i = n - 1; i > 0; --i) {  // Fisher-Yates on the raw engine
            const auto j = static_cast<int>(next_below(rng, static_cast<std::uint64_t>(i + 1)));
            std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
        return idx;
    };

    switch (kind) {
        case MistakeKind::SwapAdjacent: {
            if (k < 2) throw InvalidInputError("swap_adjacent needs sequences of length >= 2");
            for (int i : pick_order(k - 1)) {
                std::vector<LabelId> out = steps;
                std::swap(out[static_cast<std::size_t>(i)], out[static_cast<std::size_t>(i + 1)]);
                const bool left_ok = i == 0 || out[static_cast<std::size_t>(i - 1)] !=
                                                   out[static_cast<std::size_t>(i)];
                const bool right_ok = i + 2 >= k || out[static_cast<std::size_t>(i + 1)] !=
                                                        out[static_cast<std::size_t>(i + 2)];
                if (left_ok && right_ok) return {std::move(out), i, "order"};
            }
            throw InvalidInputError("no valid adjacent swap in sequence");
        }
        case MistakeKind::OmitStep: {
            if (k < 2) throw InvalidInputError("omit_step needs sequences of length >= 2");
            for (int i : pick_order(k - 1)) {  // never omit the last step
                std::vector<LabelId> out = steps;
                out.erase(out.begin() + i);
                if (i > 0 && out[static_cast<std::size_t>(i - 1)] ==
                                 out[static_cast<std::size_t>(i)]) {
                    continue;
                }
                return {std::move(out), i, "omit"};
            }
            throw InvalidInputError("no valid step omission in sequence");
        }
        case MistakeKind::InsertForeign: {
            for (int i : pick_order(k)) {  // insert before step i
                std::vector<LabelId> candidates;
                for (LabelId l = 0; l < vocab_size; ++l) {
                    const bool clashes_left = i > 0 && steps[static_cast<std::size_t>(i - 1)] == l;
                    const bool clashes_right = steps[static_cast<std::size_t>(i)] == l;
                    if (!clashes_left && !clashes_right) candidates.push_back(l);
                }
                if (candidates.empty()) continue;
                std::vector<LabelId> out = steps;
                out.insert(out.begin() + i, candidates[next_below(rng, candidates.size())]);
                return {std::move(out), i, "repeat"};
            }
            throw InvalidInputError("no valid insertion point in sequence");
        }
    }
    throw InvalidInputError("unknown mistake kind");
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec, int n_train, int n_test) {
    validate_spec(spec);
    if (n_train < 0 || n_test < 0) throw InvalidInputError("video counts must be >= 0");

    Dataset ds;
    ds.vocab = synthetic_vocabulary(spec.vocab_size);
    std::mt19937_64 rng(spec.seed);

    const int lo = std::max(1, static_cast<int>(spec.mean_segment_frames - spec.segment_spread));
    const int hi = std::max(lo, static_cast<int>(spec.mean_segment_frames + spec.segment_spread));
    auto duration = [&](std::mt19937_64& r) {
        return lo + static_cast<int>(next_below(r, static_cast<std::uint64_t>(hi - lo + 1)));
    };

    auto make_video = [&](const std::string& video_id, bool with_mistake) {
        const TaskGrammar& task = spec.grammar[next_below(rng, spec.grammar.size())];
        const std::vector<LabelId>& base =
            task.sequences[next_below(rng, task.sequences.size())];

        VideoRecord rec;
        rec.video_id = video_id;
        rec.task_id = task.task_id;
        rec.fps = spec.fps;

        std::vector<LabelId> steps = base;
        int first_bad_step = -1;
        if (with_mistake) {
            InjectedMistake injected = inject_mistake(base, spec.mistake_kind, spec.vocab_size, rng);
            steps = std::move(injected.steps);
            first_bad_step = injected.first_bad_step;
            rec.annotation.category = injected.category;
        }

        std::vector<LabelId>& gt = rec.gt_labels.labels;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            const int frames = duration(rng);
            if (static_cast<int>(i) == first_bad_step) {
                rec.annotation.first_mistake_frame = static_cast<int>(gt.size());
            }
            gt.insert(gt.end(), static_cast<std::size_t>(frames), steps[i]);
        }

        rec.gt_labels.video_id = video_id;
        rec.gt_labels.fps = spec.fps;
        rec.recognizer_labels = rec.gt_labels;
        for (LabelId& l : rec.recognizer_labels.labels) {
            if (next_unit(rng) < spec.noise_rate) {
                const auto offset = 1 + static_cast<LabelId>(next_below(
                                            rng, static_cast<std::uint64_t>(spec.vocab_size - 1)));
                l = (l + offset) % spec.vocab_size;
            }
        }
        return rec;
    };

    char id_buf[32];
    for (int v = 0; v < n_train; ++v) {
        std::snprintf(id_buf, sizeof(id_buf), "syn_train_%03d", v);
        ds.records.push_back(make_video(id_buf, false));
    }
    for (int v = 0; v < n_test; ++v) {
        std::snprintf(id_buf, sizeof(id_buf), "syn_test_%03d", v);
        ds.records.push_back(make_video(id_buf, true));
    }
    return ds;
}

}  // namespace prego
