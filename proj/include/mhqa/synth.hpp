#pragma once

#include <cstdint>
#include <vector>

#include "mhqa/data.hpp"

namespace mhqa {

// Deterministic generator for desk-scale multi-hop corpora. Two example
// shapes, mirroring the two reasoning types:
//
//   bridge      question names entity A; one relevant document links A to a
//               bridge entity B, the other states B's value (the answer).
//   comparison  question names A and B; each relevant document states the
//               value, and the answer is the value they share.
//
// All symbols within an example are drawn without replacement, so distractor
// documents reuse the sentence templates but can never complete a chain.
struct SynthConfig {
    int n_examples = 100;
    int n_docs_per_example = 6;
    int n_distractors = 4; // must equal n_docs_per_example - 2
    int sentences_per_doc = 3;
    int entity_vocab_size = 64;
    double bridge_fraction = 0.5;
    std::uint64_t seed = 0;

    void validate() const; // also checks the symbol budget per example
};

std::vector<Example> synth_generate(const SynthConfig& cfg);

// Diagnostic instances where the annotated two-document chain is undercut by
// a byte-identical copy of the value document placed earlier in the document
// list: a trained model answers correctly from the copy while matching only
// one annotated document. Ids carry the "shortcut-" prefix.
std::vector<Example> synth_generate_shortcuts(const SynthConfig& cfg, int n_examples);

} // namespace mhqa
