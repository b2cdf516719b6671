// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "prego/domain.hpp"
#include "prego/prompts.hpp"

namespace prego {

class LlmClient;
class LatencyTracker;

// What the anticipation branch claims about the upcoming step. AllowedSet
// carries the one-step-memory semantics ("any recorded successor is fine");
// NoPrediction covers unparseable replies and unseen histories.
struct AnticipatorVerdict {
    enum class Kind { Label, AllowedSet, NoPrediction };

    Kind kind{Kind::NoPrediction};
    LabelId label{-1};
    std::vector<LabelId> allowed;  // sorted ascending, non-empty when kind==AllowedSet

    static AnticipatorVerdict single(LabelId l) { return {Kind::Label, l, {}}; }
    static AnticipatorVerdict allowed_set(std::vector<LabelId> set);
    static AnticipatorVerdict none() { return {}; }

    // NoPrediction permits nothing; policy decides what that means.
    bool permits(LabelId observed) const;
    bool operator==(const AnticipatorVerdict&) const = default;
};

// C x C successor counts gathered from correct procedures only.
class TransitionMatrix {
public:
    TransitionMatrix() = default;
    TransitionMatrix(int num_labels);

    int num_labels() const { return num_labels_; }
    std::int64_t count(LabelId from, LabelId to) const;
    void add(LabelId from, LabelId to);
    std::int64_t total() const;
    // Most frequent successor, smallest id on ties; nullopt for empty rows.
    std::optional<LabelId> argmax_row(LabelId from) const;

private:
    int num_labels_{0};
    std::vector<std::int64_t> counts_;
};

TransitionMatrix fit_transition_matrix(const std::vector<ActionSequence>& training,
                                       const ActionVocabulary& vocab);

// Successors ever observed after `prev`; an all-zero row yields NoPrediction
// (every follower would be flagged).
AnticipatorVerdict one_step_memory_verdict(const TransitionMatrix& m, LabelId prev);

enum class CornerCase { Best, Worst, Random };

// Oracle baselines. Best answers the recognized action exactly on correct
// steps and anything else on mistake steps; Worst inverts that; Random draws
// a uniform label from the seeded engine.
AnticipatorVerdict corner_case_verdict(CornerCase kind, LabelId recognized_next,
                                       bool is_mistake_step, int vocab_size,
                                       std::mt19937_64& rng);

// Offline next-step predictor over training step sequences: most frequent
// successor of the trailing k-gram, backing off one order at a time.
class NgramModel {
public:
    static NgramModel fit(const std::vector<ActionSequence>& training, int order);

    int order() const { return order_; }
    AnticipatorVerdict predict(std::span<const LabelId> history) const;

private:
    int order_{1};
    // tables_[j-1]: j-gram -> successor counts
    std::vector<std::map<std::vector<LabelId>, std::map<LabelId, std::int64_t>>> tables_;
};

struct TranscriptExample {
    std::string task_id;
    std::vector<LabelId> sequence;
};

struct PromptContext {
    std::vector<TranscriptExample> transcripts;  // never includes the video under test
    std::vector<LabelId> current_sequence;       // may be empty on the first step
    Modality modality{Modality::Textual};
    std::string task_id;
};

struct PromptBundle {
    std::string system;
    std::optional<std::string> stage_one_user;  // present iff scheme == ACoT
    std::string stage_two_user;                 // final prediction query
    PromptScheme scheme{PromptScheme::FewShot};
};

// Deterministic: identical contexts render byte-identical bundles.
PromptBundle build_prompt(const PromptContext& ctx, PromptScheme scheme,
                          const ActionVocabulary& vocab);

// Exact name match, then longest vocabulary-name substring, then (numerical
// modality only) the first integer token naming a valid id; else NoPrediction.
AnticipatorVerdict parse_llm_reply(const std::string& reply, const ActionVocabulary& vocab,
                                   Modality modality);

struct AcotTrace {
    std::string reasoning;      // stage-one output, verbatim; empty for ZS/FS
    std::string final_answer;   // raw reply the verdict was parsed from
    std::vector<double> call_latencies_s;

    double total_latency_s() const {
        double t = 0.0;
        for (double v : call_latencies_s) t += v;
        return t;
    }
};

// ZS/FS issue exactly one completion call; ACoT exactly two (the reasoning
// reply is substituted into the prediction query). Transport failures raise
// ClientError and never degrade into NoPrediction.
std::pair<AnticipatorVerdict, AcotTrace> llm_anticipate(const PromptContext& ctx,
                                                        PromptScheme scheme, LlmClient& client,
                                                        const ActionVocabulary& vocab);

// Uniform next-step-predictor contract the detection engine drives. The
// recognized/oracle fields are consumed only by the corner-case baselines.
struct AnticipationQuery {
    std::span<const LabelId> history;  // strictly the steps before step_index
    int step_index{0};
    LabelId recognized{-1};
    bool oracle_is_mistake{false};
    std::string_view task_id;
};

class Anticipator {
public:
    virtual ~Anticipator() = default;
    virtual AnticipatorVerdict anticipate(const AnticipationQuery& query) = 0;
    virtual const char* name() const = 0;
};

class TransitionMatrixAnticipator : public Anticipator {
public:
    explicit TransitionMatrixAnticipator(const TransitionMatrix& matrix) : matrix_(matrix) {}
    AnticipatorVerdict anticipate(const AnticipationQuery& query) override;
    const char* name() const override { return "transition"; }

private:
    const TransitionMatrix& matrix_;
};

class NgramAnticipator : public Anticipator {
public:
    explicit NgramAnticipator(const NgramModel& model) : model_(model) {}
    AnticipatorVerdict anticipate(const AnticipationQuery& query) override {
        return model_.predict(query.history);
    }
    const char* name() const override { return "ngram"; }

private:
    const NgramModel& model_;
};

class CornerCaseAnticipator : public Anticipator {
public:
    CornerCaseAnticipator(CornerCase kind, int vocab_size, std::uint64_t seed)
        : kind_(kind), vocab_size_(vocab_size), rng_(seed) {}
    AnticipatorVerdict anticipate(const AnticipationQuery& query) override {
        return corner_case_verdict(kind_, query.recognized, query.oracle_is_mistake, vocab_size_,
                                   rng_);
    }
    const char* name() const override;

private:
    CornerCase kind_;
    int vocab_size_;
    std::mt19937_64 rng_;
};

class LlmAnticipator : public Anticipator {
public:
    LlmAnticipator(LlmClient& client, const ActionVocabulary& vocab, PromptScheme scheme,
                   Modality modality,
                   std::map<std::string, std::vector<TranscriptExample>> transcripts_by_task,
                   int context_cap, LatencyTracker* latency);

    AnticipatorVerdict anticipate(const AnticipationQuery& query) override;
    const char* name() const override { return "llm"; }

private:
    LlmClient& client_;
    const ActionVocabulary& vocab_;
    PromptScheme scheme_;
    Modality modality_;
    std::map<std::string, std::vector<TranscriptExample>> transcripts_by_task_;
    int context_cap_;
    LatencyTracker* latency_;
};

}  // namespace prego
