// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>

#include "prego/domain.hpp"

namespace prego {

enum class PromptScheme { ZeroShot, FewShot, ACoT };
enum class Modality { Textual, Numerical };

const char* scheme_name(PromptScheme s);
const char* modality_name(Modality m);

// The template texts below ship as files under assets/prompts/<version>/ as
// well; a golden test keeps the embedded copies and the files identical.
namespace prompt_assets {

inline constexpr const char* kVersion = "v1";

// Substituted with the stage-one reply before the second completion call.
inline constexpr std::string_view kReasoningPlaceholder = "{reasoning}";

std::string_view system_prompt();
std::string_view zero_shot_instruction();
std::string_view few_shot_block_template();   // placeholders: {task} {sequence} {next}
std::string_view query_block_template();      // placeholders: {task} {sequence}
std::string_view acot_reasoning();

}  // namespace prompt_assets

// "attach-cabin, attach-body" in textual modality, "3, 7" in numerical.
std::string render_sequence(std::span<const LabelId> labels, const ActionVocabulary& vocab,
                            Modality modality);

std::string render_few_shot_block(const std::string& task, const std::string& sequence,
                                  const std::string& next);
std::string render_query_block(const std::string& task, const std::string& sequence);

}  // namespace prego
