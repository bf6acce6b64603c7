#include "mhqa/data.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mhqa/text.hpp"
#include <json.hpp>

namespace mhqa {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string task_name(Task t) {
    switch (t) {
        case Task::BQA: return "bqa";
        case Task::MCQ: return "mcq";
        case Task::EQA: return "eqa";
    }
    throw std::logic_error("unreachable task");
}

Task task_from_name(const std::string& name) {
    if (name == "bqa") return Task::BQA;
    if (name == "mcq") return Task::MCQ;
    if (name == "eqa") return Task::EQA;
    throw std::invalid_argument("unknown task: '" + name + "'");
}

DatasetFormat dataset_format_from_name(const std::string& name) {
    if (name == "hotpot_distractor") return DatasetFormat::HotpotDistractor;
    if (name == "eraser") return DatasetFormat::Eraser;
    throw std::invalid_argument("unknown dataset format: '" + name + "'");
}

void Example::validate() const {
    auto fail = [&](const std::string& field, const std::string& why) {
        throw std::invalid_argument("example '" + id + "': field '" + field + "': " + why);
    };
    if (question.empty()) fail("question", "must be non-empty");
    if (documents.empty()) fail("documents", "must be non-empty");
    for (std::size_t d = 0; d < documents.size(); ++d) {
        const auto& doc = documents[d];
        if (doc.sentences.empty()) fail("documents[" + std::to_string(d) + "]", "needs at least one sentence");
        for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
            if (doc.sentences[s].empty()) {
                fail("documents[" + std::to_string(d) + "].sentences[" + std::to_string(s) + "]",
                     "sentence is empty");
            }
        }
    }
    const int n_docs = static_cast<int>(documents.size());
    if (gold_docs) {
        for (int d : *gold_docs) {
            if (d < 0 || d >= n_docs) fail("gold_docs", "document index " + std::to_string(d) + " out of range");
        }
    }
    if (gold_rationale) {
        for (const auto& [d, s] : *gold_rationale) {
            if (d < 0 || d >= n_docs) {
                fail("gold_rationale", "document index " + std::to_string(d) + " out of range");
            }
            const int n_sents = static_cast<int>(documents[static_cast<std::size_t>(d)].sentences.size());
            if (s < 0 || s >= n_sents) {
                fail("gold_rationale", "sentence index " + std::to_string(s) + " out of range in document " +
                                           std::to_string(d));
            }
            if (gold_docs && !gold_docs->count(d)) {
                fail("gold_rationale", "document " + std::to_string(d) + " not in gold_docs");
            }
        }
    }
    if (task == Task::MCQ) {
        const auto& mcq = std::get<McqAnswer>(answer);
        if (mcq.choices.size() < 2) fail("answer", "mcq needs at least two choices");
        for (const auto& c : mcq.choices) {
            if (c.text.empty()) fail("answer", "mcq choice text is empty");
        }
    } else if (task == Task::EQA) {
        if (std::get<EqaAnswer>(answer).text.empty()) fail("answer", "eqa answer text is empty");
    }
}

namespace {

AnswerSpec parse_answer(Task task, const json& j, const std::string& rec) {
    if (task == Task::BQA) {
        if (!j.is_string()) throw std::invalid_argument(rec + ": field 'answer': expected label string");
        const std::string label = j.get<std::string>();
        if (label != "supported" && label != "refuted") {
            throw std::invalid_argument(rec + ": field 'answer': bqa label must be supported/refuted, got '" +
                                        label + "'");
        }
        return BqaAnswer{label == "supported"};
    }
    if (task == Task::MCQ) {
        if (!j.is_array()) throw std::invalid_argument(rec + ": field 'answer': expected choice array");
        McqAnswer mcq;
        for (const auto& c : j) {
            McqChoice choice;
            choice.text = tokenize(c.at("text").get<std::string>());
            choice.correct = c.at("correct").get<bool>();
            mcq.choices.push_back(std::move(choice));
        }
        return mcq;
    }
    if (!j.is_string()) throw std::invalid_argument(rec + ": field 'answer': expected answer string");
    return EqaAnswer{tokenize(j.get<std::string>())};
}

Example parse_native_record(const json& j, std::size_t index) {
    Example ex;
    ex.id = j.contains("id") ? j.at("id").get<std::string>() : ("record-" + std::to_string(index));
    const std::string rec = "record '" + ex.id + "'";
    auto need = [&](const char* field) -> const json& {
        if (!j.contains(field)) throw std::invalid_argument(rec + ": missing field '" + field + "'");
        return j.at(field);
    };
    ex.question = tokenize(need("question").get<std::string>());
    ex.task = task_from_name(need("task").get<std::string>());
    for (const auto& dj : need("documents")) {
        Document doc;
        doc.title = dj.value("title", "");
        for (const auto& sj : dj.at("sentences")) {
            doc.sentences.push_back(tokenize(sj.get<std::string>()));
        }
        ex.documents.push_back(std::move(doc));
    }
    ex.answer = parse_answer(ex.task, need("answer"), rec);
    if (j.contains("gold_docs")) {
        std::set<int> docs;
        for (const auto& v : j.at("gold_docs")) docs.insert(v.get<int>());
        ex.gold_docs = std::move(docs);
    }
    if (j.contains("gold_rationale")) {
        std::set<std::pair<int, int>> rat;
        for (const auto& v : j.at("gold_rationale")) {
            if (!v.is_array() || v.size() != 2) {
                throw std::invalid_argument(rec + ": field 'gold_rationale': entries must be [doc, sentence]");
            }
            rat.emplace(v[0].get<int>(), v[1].get<int>());
        }
        ex.gold_rationale = std::move(rat);
    }
    if (j.contains("reasoning_tag")) ex.reasoning_tag = j.at("reasoning_tag").get<std::string>();
    return ex;
}

// Public HotpotQA distractor fields: "context" is [[title, [sentences]]],
// "supporting_facts" is [[title, sentence_index]] with titles resolved
// against the context order.
Example parse_hotpot_record(const json& j, std::size_t index) {
    Example ex;
    ex.id = j.contains("_id") ? j.at("_id").get<std::string>()
                              : (j.contains("id") ? j.at("id").get<std::string>()
                                                  : "record-" + std::to_string(index));
    const std::string rec = "record '" + ex.id + "'";
    ex.question = tokenize(j.at("question").get<std::string>());
    ex.task = Task::EQA;
    std::vector<std::string> titles;
    for (const auto& cj : j.at("context")) {
        if (!cj.is_array() || cj.size() != 2) {
            throw std::invalid_argument(rec + ": field 'context': entries must be [title, [sentences]]");
        }
        Document doc;
        doc.title = cj[0].get<std::string>();
        for (const auto& sj : cj[1]) doc.sentences.push_back(tokenize(sj.get<std::string>()));
        titles.push_back(doc.title);
        ex.documents.push_back(std::move(doc));
    }
    ex.answer = EqaAnswer{tokenize(j.at("answer").get<std::string>())};
    if (j.contains("supporting_facts")) {
        std::set<int> docs;
        std::set<std::pair<int, int>> rat;
        for (const auto& sf : j.at("supporting_facts")) {
            const std::string title = sf.at(0).get<std::string>();
            auto it = std::find(titles.begin(), titles.end(), title);
            if (it == titles.end()) {
                throw std::invalid_argument(rec + ": field 'supporting_facts': unknown title '" + title + "'");
            }
            const int d = static_cast<int>(it - titles.begin());
            docs.insert(d);
            rat.emplace(d, sf.at(1).get<int>());
        }
        ex.gold_docs = std::move(docs);
        ex.gold_rationale = std::move(rat);
    }
    if (j.contains("type")) ex.reasoning_tag = j.at("type").get<std::string>();
    return ex;
}

} // namespace

std::vector<Example> load_dataset(const std::string& path, DatasetFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string content = buf.str();
    if (content.find_first_not_of(" \t\r\n") == std::string::npos) {
        return {}; // empty file: no records
    }
    json root;
    try {
        root = json::parse(content);
    } catch (const json::exception& e) {
        throw std::runtime_error("dataset '" + path + "' is not valid JSON: " + e.what());
    }
    if (!root.is_array()) throw std::runtime_error("dataset '" + path + "': top level must be an array");

    std::vector<Example> out;
    out.reserve(root.size());
    for (std::size_t i = 0; i < root.size(); ++i) {
        const json& j = root[i];
        Example ex;
        try {
            const bool hotpot_shape = j.contains("context") && !j.contains("documents");
            if (format == DatasetFormat::HotpotDistractor && hotpot_shape) {
                ex = parse_hotpot_record(j, i);
            } else {
                ex = parse_native_record(j, i);
            }
        } catch (const json::exception& e) {
            throw std::runtime_error("dataset '" + path + "', record " + std::to_string(i) + ": " + e.what());
        }
        ex.validate();
        out.push_back(std::move(ex));
    }
    return out;
}

void save_dataset(const std::string& path, const std::vector<Example>& examples) {
    ordered_json root = ordered_json::array();
    for (const auto& ex : examples) {
        ordered_json j;
        j["id"] = ex.id;
        j["question"] = join_tokens(ex.question);
        j["task"] = task_name(ex.task);
        ordered_json docs = ordered_json::array();
        for (const auto& d : ex.documents) {
            ordered_json dj;
            dj["title"] = d.title;
            ordered_json sents = ordered_json::array();
            for (const auto& s : d.sentences) sents.push_back(join_tokens(s));
            dj["sentences"] = std::move(sents);
            docs.push_back(std::move(dj));
        }
        j["documents"] = std::move(docs);
        if (ex.task == Task::BQA) {
            j["answer"] = std::get<BqaAnswer>(ex.answer).supported ? "supported" : "refuted";
        } else if (ex.task == Task::MCQ) {
            ordered_json choices = ordered_json::array();
            for (const auto& c : std::get<McqAnswer>(ex.answer).choices) {
                ordered_json cj;
                cj["text"] = join_tokens(c.text);
                cj["correct"] = c.correct;
                choices.push_back(std::move(cj));
            }
            j["answer"] = std::move(choices);
        } else {
            j["answer"] = join_tokens(std::get<EqaAnswer>(ex.answer).text);
        }
        if (ex.gold_docs) {
            ordered_json gd = ordered_json::array();
            for (int d : *ex.gold_docs) gd.push_back(d);
            j["gold_docs"] = std::move(gd);
        }
        if (ex.gold_rationale) {
            ordered_json gr = ordered_json::array();
            for (const auto& [d, s] : *ex.gold_rationale) gr.push_back(ordered_json::array({d, s}));
            j["gold_rationale"] = std::move(gr);
        }
        if (ex.reasoning_tag) j["reasoning_tag"] = *ex.reasoning_tag;
        root.push_back(std::move(j));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open dataset file for writing: " + path);
    out << root.dump(2) << '\n';
}

} // namespace mhqa
