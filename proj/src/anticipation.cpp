// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#include "prego/anticipation.hpp"

#include <algorithm>
#include <cctype>

#include "prego/llm_client.hpp"

namespace prego {

AnticipatorVerdict AnticipatorVerdict::allowed_set(std::vector<LabelId> set) {
    if (set.empty()) {
        throw InvalidInputError("an AllowedSet verdict needs at least one label");
    }
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    return {Kind::AllowedSet, -1, std::move(set)};
}

bool AnticipatorVerdict::permits(LabelId observed) const {
    switch (kind) {
        case Kind::Label: return observed == label;
        case Kind::AllowedSet:
            return std::binary_search(allowed.begin(), allowed.end(), observed);
        case Kind::NoPrediction: return false;
    }
    return false;
}

TransitionMatrix::TransitionMatrix(int num_labels) : num_labels_(num_labels) {
    if (num_labels < 1) throw InvalidInputError("transition matrix needs a non-empty vocabulary");
    counts_.assign(static_cast<std::size_t>(num_labels) * static_cast<std::size_t>(num_labels), 0);
}

std::int64_t TransitionMatrix::count(LabelId from, LabelId to) const {
    if (from < 0 || from >= num_labels_ || to < 0 || to >= num_labels_) {
        throw InvalidInputError("transition index outside vocabulary");
    }
    return counts_[static_cast<std::size_t>(from) * static_cast<std::size_t>(num_labels_) +
                   static_cast<std::size_t>(to)];
}

void TransitionMatrix::add(LabelId from, LabelId to) {
    if (from < 0 || from >= num_labels_ || to < 0 || to >= num_labels_) {
        throw InvalidInputError("transition index outside vocabulary");
    }
    ++counts_[static_cast<std::size_t>(from) * static_cast<std::size_t>(num_labels_) +
              static_cast<std::size_t>(to)];
}

std::int64_t TransitionMatrix::total() const {
    std::int64_t t = 0;
    for (std::int64_t c : counts_) t += c;
    return t;
}

std::optional<LabelId> TransitionMatrix::argmax_row(LabelId from) const {
    std::int64_t best = 0;
    std::optional<LabelId> best_label;
    for (LabelId to = 0; to < num_labels_; ++to) {
        const std::int64_t c = count(from, to);
        if (c > best) {
            best = c;
            best_label = to;
        }
    }
    return best_label;
}

TransitionMatrix fit_transition_matrix(const std::vector<ActionSequence>& training,
                                       const ActionVocabulary& vocab) {
    if (training.empty()) {
        throw InvalidInputError("cannot fit a transition matrix on an empty training set");
    }
    TransitionMatrix m(vocab.size());
    for (const ActionSequence& seq : training) {
        const std::vector<LabelId> labels = seq.labels();
        for (LabelId l : labels) {
            if (!vocab.contains(l)) {
                throw InvalidInputError("training sequence uses label " + std::to_string(l) +
                                        " outside the vocabulary");
            }
        }
        for (std::size_t i = 1; i < labels.size(); ++i) {
            m.add(labels[i - 1], labels[i]);
        }
    }
    return m;
}

AnticipatorVerdict one_step_memory_verdict(const TransitionMatrix& m, LabelId prev) {
    std::vector<LabelId> successors;
    for (LabelId to = 0; to < m.num_labels(); ++to) {
        if (m.count(prev, to) > 0) successors.push_back(to);
    }
    if (successors.empty()) return AnticipatorVerdict::none();
    return AnticipatorVerdict::allowed_set(std::move(successors));
}

AnticipatorVerdict corner_case_verdict(CornerCase kind, LabelId recognized_next,
                                       bool is_mistake_step, int vocab_size,
                                       std::mt19937_64& rng) {
    if (vocab_size < 2) {
        throw InvalidInputError("corner-case baselines need a vocabulary of at least 2 labels");
    }
    const LabelId different = (recognized_next + 1) % vocab_size;
    switch (kind) {
        case CornerCase::Best:
            return AnticipatorVerdict::single(is_mistake_step ? different : recognized_next);
        case CornerCase::Worst:
            return AnticipatorVerdict::single(is_mistake_step ? recognized_next : different);
        case CornerCase::Random: {
            std::uniform_int_distribution<LabelId> pick(0, vocab_size - 1);
            return AnticipatorVerdict::single(pick(rng));
        }
    }
    throw InvalidInputError("unknown corner case");
}

NgramModel NgramModel::fit(const std::vector<ActionSequence>& training, int order) {
    if (order < 1) throw InvalidInputError("n-gram order must be >= 1");
    if (training.empty()) {
        throw InvalidInputError("cannot fit an n-gram model on an empty training set");
    }
    NgramModel model;
    model.order_ = order;
    model.tables_.resize(static_cast<std::size_t>(order));
    for (const ActionSequence& seq : training) {
        const std::vector<LabelId> labels = seq.labels();
        for (int j = 1; j <= order; ++j) {
            auto& table = model.tables_[static_cast<std::size_t>(j - 1)];
            for (std::size_t t = static_cast<std::size_t>(j); t < labels.size(); ++t) {
                std::vector<LabelId> gram(labels.begin() + static_cast<std::ptrdiff_t>(t - j),
                                          labels.begin() + static_cast<std::ptrdiff_t>(t));
                ++table[std::move(gram)][labels[t]];
            }
        }
    }
    return model;
}

AnticipatorVerdict NgramModel::predict(std::span<const LabelId> history) const {
    const int longest = std::min<int>(order_, static_cast<int>(history.size()));
    for (int j = longest; j >= 1; --j) {
        const auto& table = tables_[static_cast<std::size_t>(j - 1)];
        std::vector<LabelId> gram(history.end() - j, history.end());
        const auto it = table.find(gram);
        if (it == table.end()) continue;
        std::int64_t best = 0;
        LabelId best_label = -1;
        for (const auto& [label, count] : it->second) {
            if (count > best) {  // map iteration is id-ascending, ties keep the smaller id
                best = count;
                best_label = label;
            }
        }
        if (best_label >= 0) return AnticipatorVerdict::single(best_label);
    }
    return AnticipatorVerdict::none();
}

namespace {

void check_context(const PromptContext& ctx, const ActionVocabulary& vocab) {
    for (const TranscriptExample& t : ctx.transcripts) {
        if (t.sequence.empty()) {
            throw InvalidInputError("context transcript for task '" + t.task_id + "' is empty");
        }
        for (LabelId l : t.sequence) {
            if (!vocab.contains(l)) {
                throw InvalidInputError("context transcript uses unknown label " +
                                        std::to_string(l));
            }
        }
    }
    for (LabelId l : ctx.current_sequence) {
        if (!vocab.contains(l)) {
            throw InvalidInputError("current sequence uses unknown label " + std::to_string(l));
        }
    }
}

std::string render_transcript_blocks(const PromptContext& ctx, const ActionVocabulary& vocab) {
    std::string out;
    for (const TranscriptExample& t : ctx.transcripts) {
        std::span<const LabelId> all(t.sequence);
        const std::string sequence =
            render_sequence(all.subspan(0, all.size() - 1), vocab, ctx.modality);
        const std::string next = render_sequence(all.subspan(all.size() - 1), vocab, ctx.modality);
        out += render_few_shot_block(t.task_id, sequence, next);
        out += '\n';
    }
    return out;
}

std::string render_current_context(const PromptContext& ctx, const ActionVocabulary& vocab) {
    return "Toy: \"" + ctx.task_id + "\"\nInput Sequence:\n" +
           render_sequence(ctx.current_sequence, vocab, ctx.modality) + "\n";
}

}  // namespace

PromptBundle build_prompt(const PromptContext& ctx, PromptScheme scheme,
                          const ActionVocabulary& vocab) {
    check_context(ctx, vocab);
    if ((scheme == PromptScheme::FewShot || scheme == PromptScheme::ACoT) &&
        ctx.transcripts.empty()) {
        throw InvalidInputError(std::string(scheme_name(scheme)) +
                                " prompting needs at least one context transcript");
    }

    const std::string query = render_query_block(
        ctx.task_id, render_sequence(ctx.current_sequence, vocab, ctx.modality));

    PromptBundle bundle;
    bundle.scheme = scheme;
    switch (scheme) {
        case PromptScheme::ZeroShot:
            bundle.system = std::string(prompt_assets::zero_shot_instruction()) + "\n" +
                            std::string(prompt_assets::system_prompt());
            bundle.stage_two_user = query;
            break;
        case PromptScheme::FewShot:
            bundle.system = std::string(prompt_assets::system_prompt());
            bundle.stage_two_user = render_transcript_blocks(ctx, vocab) + query;
            break;
        case PromptScheme::ACoT: {
            bundle.system = std::string(prompt_assets::system_prompt());
            const std::string blocks = render_transcript_blocks(ctx, vocab);
            bundle.stage_one_user = blocks + render_current_context(ctx, vocab) + "\n" +
                                    std::string(prompt_assets::acot_reasoning());
            bundle.stage_two_user = blocks +
                                    std::string(prompt_assets::kReasoningPlaceholder) + "\n\n" +
                                    query;
            break;
        }
    }
    return bundle;
}

namespace {

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(const std::string& text) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && is_space(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && is_space(static_cast<unsigned char>(text[end - 1]))) --end;
    return text.substr(begin, end - begin);
}

}  // namespace

AnticipatorVerdict parse_llm_reply(const std::string& reply, const ActionVocabulary& vocab,
                                   Modality modality) {
    const std::string lowered = lowercase(trim(reply));
    if (lowered.empty()) return AnticipatorVerdict::none();

    if (auto exact = vocab.find(lowered)) {
        return AnticipatorVerdict::single(*exact);
    }
    // Fall back to names mentioned anywhere in the reply; the longest wins.
    std::optional<LabelId> best;
    std::size_t best_len = 0;
    for (const VocabEntry& e : vocab.entries()) {
        const std::string name = lowercase(e.name);
        if (name.size() > best_len && lowered.find(name) != std::string::npos) {
            best = e.id;
            best_len = name.size();
        }
    }
    if (best) return AnticipatorVerdict::single(*best);

    if (modality == Modality::Numerical) {
        for (std::size_t i = 0; i < lowered.size();) {
            if (std::isdigit(static_cast<unsigned char>(lowered[i]))) {
                std::size_t j = i;
                while (j < lowered.size() && std::isdigit(static_cast<unsigned char>(lowered[j]))) {
                    ++j;
                }
                try {
                    const long value = std::stol(lowered.substr(i, j - i));
                    if (value >= 0 && value < vocab.size()) {
                        return AnticipatorVerdict::single(static_cast<LabelId>(value));
                    }
                } catch (const std::exception&) {
                    // overflow: skip this token
                }
                i = j;
            } else {
                ++i;
            }
        }
    }
    return AnticipatorVerdict::none();
}

std::pair<AnticipatorVerdict, AcotTrace> llm_anticipate(const PromptContext& ctx,
                                                        PromptScheme scheme, LlmClient& client,
                                                        const ActionVocabulary& vocab) {
    const PromptBundle bundle = build_prompt(ctx, scheme, vocab);
    AcotTrace trace;

    std::string final_user = bundle.stage_two_user;
    if (scheme == PromptScheme::ACoT) {
        const CompletionResult stage_one = client.complete(bundle.system, *bundle.stage_one_user);
        trace.reasoning = stage_one.text;
        trace.call_latencies_s.push_back(stage_one.latency.count());
        const std::size_t pos = final_user.find(prompt_assets::kReasoningPlaceholder);
        if (pos != std::string::npos) {
            final_user.replace(pos, prompt_assets::kReasoningPlaceholder.size(), trace.reasoning);
        }
    }

    const CompletionResult result = client.complete(bundle.system, final_user);
    trace.final_answer = result.text;
    trace.call_latencies_s.push_back(result.latency.count());

    return {parse_llm_reply(result.text, vocab, ctx.modality), std::move(trace)};
}

AnticipatorVerdict TransitionMatrixAnticipator::anticipate(const AnticipationQuery& query) {
    if (query.history.empty()) {
        // No transition to check before the first step; allow anything.
        std::vector<LabelId> all(static_cast<std::size_t>(matrix_.num_labels()));
        for (int i = 0; i < matrix_.num_labels(); ++i) all[static_cast<std::size_t>(i)] = i;
        return AnticipatorVerdict::allowed_set(std::move(all));
    }
    return one_step_memory_verdict(matrix_, query.history.back());
}

const char* CornerCaseAnticipator::name() const {
    switch (kind_) {
        case CornerCase::Best: return "best";
        case CornerCase::Worst: return "worst";
        case CornerCase::Random: return "random";
    }
    return "?";
}

LlmAnticipator::LlmAnticipator(LlmClient& client, const ActionVocabulary& vocab,
                               PromptScheme scheme, Modality modality,
                               std::map<std::string, std::vector<TranscriptExample>>
                                   transcripts_by_task,
                               int context_cap, LatencyTracker* latency)
    : client_(client),
      vocab_(vocab),
      scheme_(scheme),
      modality_(modality),
      transcripts_by_task_(std::move(transcripts_by_task)),
      context_cap_(context_cap),
      latency_(latency) {}

AnticipatorVerdict LlmAnticipator::anticipate(const AnticipationQuery& query) {
    PromptContext ctx;
    ctx.task_id = std::string(query.task_id);
    ctx.modality = modality_;
    ctx.current_sequence.assign(query.history.begin(), query.history.end());
    const auto it = transcripts_by_task_.find(ctx.task_id);
    if (it != transcripts_by_task_.end()) {
        const auto cap = static_cast<std::size_t>(std::max(0, context_cap_));
        const std::size_t take = std::min(cap, it->second.size());
        ctx.transcripts.assign(it->second.begin(),
                               it->second.begin() + static_cast<std::ptrdiff_t>(take));
    }

    auto [verdict, trace] = llm_anticipate(ctx, scheme_, client_, vocab_);
    if (latency_ != nullptr) {
        latency_->record(scheme_name(scheme_), trace.total_latency_s());
    }
    return verdict;
}

}  // namespace prego
