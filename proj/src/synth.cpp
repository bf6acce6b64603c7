#include "mhqa/synth.hpp"

#include <cstdio>
#include <stdexcept>
#include <string>

#include "mhqa/rng.hpp"
#include "mhqa/text.hpp"

namespace mhqa {

namespace {

std::string symbol(const char* role, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%03d", role, index);
    return buf;
}

// Per-example draw-without-replacement over the shared symbol index pool.
class SymbolPool {
public:
    SymbolPool(int vocab_size, std::mt19937_64& gen) : indices_(static_cast<std::size_t>(vocab_size)) {
        for (int i = 0; i < vocab_size; ++i) indices_[static_cast<std::size_t>(i)] = i;
        shuffle_inplace(indices_, gen);
    }
    int draw() {
        if (next_ >= indices_.size()) throw std::invalid_argument("synth: entity vocabulary exhausted");
        return indices_[next_++];
    }
    std::string ent() { return symbol("ent", draw()); }
    std::string val() { return symbol("val", draw()); }

private:
    std::vector<int> indices_;
    std::size_t next_ = 0;
};

std::vector<std::string> link_sentence(const std::string& a, const std::string& b) {
    return tokenize(a + " partners " + b + " .");
}

std::vector<std::string> value_sentence(const std::string& e, const std::string& v) {
    return tokenize(e + " has value " + v + " .");
}

// One filler sentence is drawn per example and repeated in every document.
// It carries a decoy value, so no document can present an answer-neutral
// sentence, yet it is identical across documents: it adds no document-level
// signature and cancels out of embedding differences. The verb keeps it
// separable from chain sentences by surface form.
std::vector<std::string> make_filler(SymbolPool& pool) {
    return tokenize(pool.ent() + " holds " + pool.val() + " .");
}

Document make_doc(int index) {
    Document d;
    d.title = "doc-" + std::to_string(index);
    return d;
}

// A document whose one content sentence sits at a drawn position among
// copies of the example's filler sentence; returns the content position.
int fill_doc(Document& doc, std::vector<std::string> content, int sentences_per_doc,
             const std::vector<std::string>& filler, std::mt19937_64& gen) {
    const int pos = static_cast<int>(rand_below(gen, static_cast<std::uint64_t>(sentences_per_doc)));
    for (int s = 0; s < sentences_per_doc; ++s) {
        doc.sentences.push_back(s == pos ? content : filler);
    }
    return pos;
}

// Distractor documents mirror the value-document shape with disjoint
// symbols, so document selection cannot succeed on surface form alone.
void add_distractor(Example& ex, int doc_index, int sentences_per_doc,
                    const std::vector<std::string>& filler, SymbolPool& pool,
                    std::mt19937_64& gen) {
    Document doc = make_doc(doc_index);
    fill_doc(doc, value_sentence(pool.ent(), pool.val()), sentences_per_doc, filler, gen);
    ex.documents[static_cast<std::size_t>(doc_index)] = std::move(doc);
}

int symbols_per_example(const SynthConfig& cfg) {
    // chain symbols + the shared filler pair + one (entity, value) pair per
    // distractor content sentence
    return 3 + 2 + cfg.n_distractors * 2;
}

} // namespace

void SynthConfig::validate() const {
    if (n_examples < 0) throw std::invalid_argument("synth: n_examples must be >= 0");
    if (n_docs_per_example < 2) throw std::invalid_argument("synth: need at least two documents");
    if (n_distractors != n_docs_per_example - 2) {
        throw std::invalid_argument("synth: n_distractors must equal n_docs_per_example - 2");
    }
    if (sentences_per_doc < 1) throw std::invalid_argument("synth: sentences_per_doc must be >= 1");
    if (bridge_fraction < 0.0 || bridge_fraction > 1.0) {
        throw std::invalid_argument("synth: bridge_fraction must be in [0, 1]");
    }
    if (entity_vocab_size < symbols_per_example(*this)) {
        throw std::invalid_argument(
            "synth: entity_vocab_size " + std::to_string(entity_vocab_size) +
            " is too small to keep distractor chains disjoint; need at least " +
            std::to_string(symbols_per_example(*this)));
    }
    if (entity_vocab_size > 1000) throw std::invalid_argument("synth: entity_vocab_size must be <= 1000");
}

std::vector<Example> synth_generate(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 gen(cfg.seed);
    std::vector<Example> out;
    out.reserve(static_cast<std::size_t>(cfg.n_examples));

    for (int i = 0; i < cfg.n_examples; ++i) {
        const bool bridge = rand_unit(gen) < cfg.bridge_fraction;
        SymbolPool pool(cfg.entity_vocab_size, gen);

        Example ex;
        char idbuf[32];
        std::snprintf(idbuf, sizeof(idbuf), "synth-%04d", i);
        ex.id = idbuf;
        ex.task = Task::EQA;
        ex.reasoning_tag = bridge ? "bridge" : "comparison";
        ex.documents.resize(static_cast<std::size_t>(cfg.n_docs_per_example));

        const std::string a = pool.ent();
        const std::string b = pool.ent();
        const std::string v = pool.val();

        std::vector<int> positions(static_cast<std::size_t>(cfg.n_docs_per_example));
        for (int d = 0; d < cfg.n_docs_per_example; ++d) positions[static_cast<std::size_t>(d)] = d;
        shuffle_inplace(positions, gen);
        const int g1 = positions[0];
        const int g2 = positions[1];

        std::vector<std::string> chain1, chain2;
        if (bridge) {
            ex.question = tokenize("value of partner of " + a + " ?");
            chain1 = link_sentence(a, b);
            chain2 = value_sentence(b, v);
        } else {
            ex.question = tokenize("value shared by " + a + " and " + b + " ?");
            chain1 = value_sentence(a, v);
            chain2 = value_sentence(b, v);
        }
        ex.answer = EqaAnswer{{v}};

        const std::vector<std::string> filler = make_filler(pool);
        Document d1 = make_doc(g1);
        const int s1 = fill_doc(d1, std::move(chain1), cfg.sentences_per_doc, filler, gen);
        ex.documents[static_cast<std::size_t>(g1)] = std::move(d1);
        Document d2 = make_doc(g2);
        const int s2 = fill_doc(d2, std::move(chain2), cfg.sentences_per_doc, filler, gen);
        ex.documents[static_cast<std::size_t>(g2)] = std::move(d2);

        for (int p = 2; p < cfg.n_docs_per_example; ++p) {
            add_distractor(ex, positions[static_cast<std::size_t>(p)], cfg.sentences_per_doc,
                           filler, pool, gen);
        }

        ex.gold_docs = std::set<int>{g1, g2};
        ex.gold_rationale = std::set<std::pair<int, int>>{{g1, s1}, {g2, s2}};
        ex.validate();
        out.push_back(std::move(ex));
    }
    return out;
}

std::vector<Example> synth_generate_shortcuts(const SynthConfig& cfg, int n_examples) {
    cfg.validate();
    if (cfg.n_docs_per_example < 3) {
        throw std::invalid_argument("synth: shortcut examples need at least three documents");
    }
    std::mt19937_64 gen(derive_seed(cfg.seed, 0x5c0u));
    std::vector<Example> out;
    out.reserve(static_cast<std::size_t>(n_examples));

    for (int i = 0; i < n_examples; ++i) {
        SymbolPool pool(cfg.entity_vocab_size, gen);

        Example ex;
        char idbuf[32];
        std::snprintf(idbuf, sizeof(idbuf), "shortcut-%04d", i);
        ex.id = idbuf;
        ex.task = Task::EQA;
        ex.reasoning_tag = "bridge";
        ex.documents.resize(static_cast<std::size_t>(cfg.n_docs_per_example));

        const std::string a = pool.ent();
        const std::string b = pool.ent();
        const std::string v = pool.val();
        ex.question = tokenize("value of partner of " + a + " ?");
        ex.answer = EqaAnswer{{v}};

        std::vector<int> positions(static_cast<std::size_t>(cfg.n_docs_per_example));
        for (int d = 0; d < cfg.n_docs_per_example; ++d) positions[static_cast<std::size_t>(d)] = d;
        shuffle_inplace(positions, gen);
        const int g1 = positions[0];
        // The duplicate sits before the annotated value document, so exact
        // score ties resolve toward the unannotated copy.
        const int dup = std::min(positions[1], positions[2]);
        const int g2 = std::max(positions[1], positions[2]);

        const std::vector<std::string> filler = make_filler(pool);
        Document link_doc = make_doc(g1);
        const int s1 =
            fill_doc(link_doc, link_sentence(a, b), cfg.sentences_per_doc, filler, gen);
        ex.documents[static_cast<std::size_t>(g1)] = std::move(link_doc);

        Document value_doc = make_doc(g2);
        const int s2 =
            fill_doc(value_doc, value_sentence(b, v), cfg.sentences_per_doc, filler, gen);
        Document copy = value_doc;
        copy.title = "doc-" + std::to_string(dup);
        ex.documents[static_cast<std::size_t>(g2)] = std::move(value_doc);
        ex.documents[static_cast<std::size_t>(dup)] = std::move(copy);

        for (int p = 3; p < cfg.n_docs_per_example; ++p) {
            add_distractor(ex, positions[static_cast<std::size_t>(p)], cfg.sentences_per_doc,
                           filler, pool, gen);
        }

        ex.gold_docs = std::set<int>{g1, g2};
        ex.gold_rationale = std::set<std::pair<int, int>>{{g1, s1}, {g2, s2}};
        ex.validate();
        out.push_back(std::move(ex));
    }
    return out;
}

} // namespace mhqa
