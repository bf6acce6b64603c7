#include <doctest.h>
#include <stdexcept>

#include "mhqa/prompt.hpp"

using namespace mhqa;

// Golden strings for the three text-to-text conversions.

TEST_CASE("bqa prompt renders the claim-verification template") {
    const auto r = render_prompt(Task::BQA, "Steve Wozniak designed homes.",
                                 "Steve Wozniak primarily designed the 1977 Apple II , known as one "
                                 "of the first highly successful mass-produced microcomputers.");
    CHECK(r.input ==
          "A claim to be verified is that Steve Wozniak designed homes. We have following facts: "
          "Steve Wozniak primarily designed the 1977 Apple II , known as one of the first highly "
          "successful mass-produced microcomputers.");
    CHECK(r.output == "The claim is thus {supported/refuted}.");
    CHECK(bqa_output(true) == "The claim is thus supported.");
    CHECK(bqa_output(false) == "The claim is thus refuted.");
}

TEST_CASE("mcq prompt stacks every choice with its truth value") {
    const std::vector<std::pair<std::string, bool>> choices = {
        {"Eraser", false}, {"Inkpot", true}, {"Pen", true}};
    const auto r = render_prompt(Task::MCQ,
                                 "Name few objects said to be in or on Allan 's desk.",
                                 "Opening a side drawer, he took out a piece of paper and his inkpot.",
                                 &choices);
    CHECK(r.input ==
          "Question: Name few objects said to be in or on Allan 's desk. [SEP] Opening a side "
          "drawer, he took out a piece of paper and his inkpot.");
    CHECK(r.output ==
          "Answer: Eraser (wrong) [SEP] Answer: Inkpot (correct) [SEP] Answer: Pen (correct)");
}

TEST_CASE("mcq prompt requires choices") {
    CHECK_THROWS_AS(render_prompt(Task::MCQ, "q", "z"), std::invalid_argument);
    const std::vector<std::pair<std::string, bool>> none;
    CHECK_THROWS_AS(render_prompt(Task::MCQ, "q", "z", &none), std::invalid_argument);
}

TEST_CASE("eqa prompt joins question and rationale with a separator") {
    const auto r = render_prompt(
        Task::EQA,
        "Which American railroad, located in Southwestern Montana and Idaho, was backed by the "
        "Northern Pacific Railway?",
        "The Gilmore and Pittsburgh Railroad (G&P), now defunct, was an American railroad located "
        "in southwestern Montana and east-central Idaho.");
    CHECK(r.input ==
          "Which American railroad, located in Southwestern Montana and Idaho, was backed by the "
          "Northern Pacific Railway? [SEP] The Gilmore and Pittsburgh Railroad (G&P), now defunct, "
          "was an American railroad located in southwestern Montana and east-central Idaho.");
    CHECK(r.output == "{y}");
}
