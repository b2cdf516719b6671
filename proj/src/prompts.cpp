// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#include "prego/prompts.hpp"

namespace prego {

const char* scheme_name(PromptScheme s) {
    switch (s) {
        case PromptScheme::ZeroShot: return "zs";
        case PromptScheme::FewShot: return "fs";
        case PromptScheme::ACoT: return "acot";
    }
    return "?";
}

const char* modality_name(Modality m) {
    switch (m) {
        case Modality::Textual: return "text";
        case Modality::Numerical: return "num";
    }
    return "?";
}

namespace prompt_assets {

namespace {

constexpr std::string_view kSystemPrompt =
    "I am going to provide an input sequence that represents a sequence of actions. Your task is "
    "to predict the next action of the last sequence based on the patterns observed in the "
    "provided input. Limit yourself to only answer with the predicted sequence, and follow the "
    "same format given as input.\n";

constexpr std::string_view kZeroShotInstruction =
    "Below is an instruction that describes the task, paired with an input. Write a response "
    "that appropriately completes the request.\n";

constexpr std::string_view kFewShotBlock =
    "Toy: \"{task}\"\n"
    "Input Sequence:\n"
    "{sequence}\n"
    "Next Symbol:\n"
    "{next}\n";

constexpr std::string_view kQueryBlock =
    "Toy: \"{task}\"\n"
    "Input Sequence:\n"
    "{sequence}\n"
    "Next Symbol:\n";

constexpr std::string_view kAcotReasoning =
    "Let's analyze each action in detail:\n"
    "1. For the action \"attach the cabin,\" consider the immediate effect and long-term "
    "consequences.\n"
    "2. Repeat this analysis for each action in the sequence.\n"
    "3. Identify patterns and causal relationships between the actions.\n"
    "Now, let's proceed with the analysis step-by-step:\n";

}  // namespace

std::string_view system_prompt() { return kSystemPrompt; }
std::string_view zero_shot_instruction() { return kZeroShotInstruction; }
std::string_view few_shot_block_template() { return kFewShotBlock; }
std::string_view query_block_template() { return kQueryBlock; }
std::string_view acot_reasoning() { return kAcotReasoning; }

}  // namespace prompt_assets

namespace {

std::string replace_once(std::string text, std::string_view placeholder, std::string_view value) {
    const std::size_t pos = text.find(placeholder);
    if (pos != std::string::npos) {
        text.replace(pos, placeholder.size(), value);
    }
    return text;
}

}  // namespace

std::string render_sequence(std::span<const LabelId> labels, const ActionVocabulary& vocab,
                            Modality modality) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i > 0) out += ", ";
        if (modality == Modality::Textual) {
            out += vocab.name(labels[i]);
        } else {
            out += std::to_string(labels[i]);
        }
    }
    return out;
}

std::string render_few_shot_block(const std::string& task, const std::string& sequence,
                                  const std::string& next) {
    std::string block(prompt_assets::few_shot_block_template());
    block = replace_once(std::move(block), "{task}", task);
    block = replace_once(std::move(block), "{sequence}", sequence);
    block = replace_once(std::move(block), "{next}", next);
    return block;
}

std::string render_query_block(const std::string& task, const std::string& sequence) {
    std::string block(prompt_assets::query_block_template());
    block = replace_once(std::move(block), "{task}", task);
    block = replace_once(std::move(block), "{sequence}", sequence);
    return block;
}

}  // namespace prego
