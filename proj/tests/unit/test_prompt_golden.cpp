// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0
//
// The template texts live twice: embedded in the library and as files under
// assets/prompts/<version>/. These tests pin both copies to each other and
// to frozen renderings.

#include <string>

#include "doctest.h"
#include "prego/io_util.hpp"
#include "prego/prompts.hpp"
#include "test_util.hpp"

using namespace prego;

namespace {

std::string asset(const std::string& name) {
    return read_file(std::string(PREGO_ASSET_DIR) + "/prompts/" + prompt_assets::kVersion + "/" +
                     name);
}

}  // namespace

TEST_CASE("embedded templates are byte-identical to the shipped assets") {
    CHECK(std::string(prompt_assets::system_prompt()) == asset("system.txt"));
    CHECK(std::string(prompt_assets::zero_shot_instruction()) ==
          asset("zero_shot_instruction.txt"));
    CHECK(std::string(prompt_assets::few_shot_block_template()) == asset("few_shot_block.txt"));
    CHECK(std::string(prompt_assets::query_block_template()) == asset("query_block.txt"));
    CHECK(std::string(prompt_assets::acot_reasoning()) == asset("acot_reasoning.txt"));
}

TEST_CASE("few-shot block renders the frozen example byte-for-byte") {
    const std::string rendered = render_few_shot_block(
        "bulldozer", "attach-cabin, attach-body, attach-track, attach-blade", "attach-figurine");
    const std::string expected =
        "Toy: \"bulldozer\"\n"
        "Input Sequence:\n"
        "attach-cabin, attach-body, attach-track, attach-blade\n"
        "Next Symbol:\n"
        "attach-figurine\n";
    CHECK(rendered == expected);
}

TEST_CASE("query block renders with a trailing completion cue") {
    const std::string rendered = render_query_block("bulldozer", "attach-cabin");
    CHECK(rendered ==
          "Toy: \"bulldozer\"\n"
          "Input Sequence:\n"
          "attach-cabin\n"
          "Next Symbol:\n");
}

TEST_CASE("sequence rendering joins names or ids") {
    const ActionVocabulary vocab = testutil::small_vocab(4);
    const std::vector<LabelId> labels{0, 1, 2};
    CHECK(render_sequence(labels, vocab, Modality::Textual) ==
          vocab.name(0) + ", " + vocab.name(1) + ", " + vocab.name(2));
    CHECK(render_sequence(labels, vocab, Modality::Numerical) == "0, 1, 2");
    CHECK(render_sequence(std::vector<LabelId>{}, vocab, Modality::Textual).empty());
}

TEST_CASE("template fixed points that downstream code relies on") {
    const std::string acot(prompt_assets::acot_reasoning());
    const std::string tail = "Now, let's proceed with the analysis step-by-step:\n";
    REQUIRE(acot.size() >= tail.size());
    CHECK(acot.substr(acot.size() - tail.size()) == tail);
    const std::string system(prompt_assets::system_prompt());
    CHECK(system.find("Limit yourself to only answer with the predicted sequence") !=
          std::string::npos);
}
