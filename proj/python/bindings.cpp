#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "alce/core.hpp"
#include "alce/eval.hpp"
#include "alce/oracle.hpp"
#include "alce/parser.hpp"
#include "alce/postedit.hpp"
#include "alce/retrieval.hpp"

namespace py = pybind11;
using namespace alce;

namespace {

Passage make_passage(const std::string& id, const std::string& title,
                     const std::string& text) {
    return Passage{id, title, text, std::nullopt};
}

std::vector<Passage> passages_from_tuples(
    const std::vector<std::tuple<std::string, std::string, std::string>>& tuples) {
    std::vector<Passage> out;
    for (const auto& [id, title, text] : tuples) out.push_back(make_passage(id, title, text));
    return out;
}

}  // namespace

PYBIND11_MODULE(_alce, m) {
    m.doc() = "Citation-quality evaluation for retrieval-augmented generation";

    py::class_<Passage>(m, "Passage")
        .def(py::init(&make_passage), py::arg("id"), py::arg("title"), py::arg("text"))
        .def_readwrite("id", &Passage::id)
        .def_readwrite("title", &Passage::title)
        .def_readwrite("text", &Passage::text);

    py::class_<Statement>(m, "Statement")
        .def_readonly("text", &Statement::text)
        .def_readonly("citations", &Statement::citations);

    py::class_<ParsedResponse>(m, "ParsedResponse")
        .def_readonly("raw_text", &ParsedResponse::raw_text)
        .def_readonly("statements", &ParsedResponse::statements);

    m.def("normalize_text", &normalize_text);
    m.def("truncate_output", &truncate_output);
    m.def(
        "extract_citations",
        [](const std::string& sentence, int max_index) {
            auto [clean, cites] = extract_citations(sentence, max_index);
            return py::make_tuple(clean, cites);
        },
        py::arg("sentence"), py::arg("max_index"));
    m.def(
        "parse_response",
        [](const std::string& raw, const std::string& kind, int max_index) {
            return parse_response(raw, dataset_kind_from_string(kind), max_index);
        },
        py::arg("raw"), py::arg("dataset"), py::arg("max_index"));

    m.def("render_premise", [](const std::vector<std::tuple<std::string, std::string,
                                                            std::string>>& passages) {
        return render_premise(passages_from_tuples(passages));
    });
    m.def("build_nli_input", &build_nli_input);

    m.def(
        "citation_scores",
        [](const ParsedResponse& parsed,
           const std::vector<std::tuple<std::string, std::string, std::string>>& passages) {
            SubstringOracle oracle;
            auto docs = passages_from_tuples(passages);
            return py::make_tuple(citation_recall(parsed, docs, oracle),
                                  citation_precision(parsed, docs, oracle));
        },
        "Citation recall and precision under the substring entailment stub");

    m.def("em_recall", [](const std::string& output,
                          const std::vector<std::vector<std::string>>& qa_pairs) {
        AsqaGold gold;
        gold.qa_pairs = qa_pairs;
        return em_recall_asqa(output, gold);
    });
    m.def("qampari_scores",
          [](const ParsedResponse& parsed,
             const std::vector<std::vector<std::string>>& answer_sets) {
              QampariGold gold;
              gold.answer_sets = answer_sets;
              auto s = qampari_scores(parsed, gold);
              return py::make_tuple(s.precision, s.recall, s.recall_5);
          });
    m.def("rouge_l", &rouge_l);
    m.def("fluency_preprocess", &fluency_preprocess);

    m.def(
        "bm25_retrieve",
        [](const std::string& query,
           const std::vector<std::tuple<std::string, std::string, std::string>>& passages,
           int k) {
            Corpus corpus{passages_from_tuples(passages)};
            Bm25Retriever retriever;
            auto ranked = retriever.retrieve(query, corpus, k);
            std::vector<std::pair<std::string, double>> out;
            for (const auto& p : ranked) out.emplace_back(p.id, p.score.value_or(0.0));
            return out;
        },
        py::arg("query"), py::arg("passages"), py::arg("k"));

    m.def(
        "post_cite",
        [](const ParsedResponse& parsed,
           const std::vector<std::tuple<std::string, std::string, std::string>>& passages) {
            HashingEmbedder embedder;
            return post_cite(parsed, passages_from_tuples(passages), embedder);
        },
        "Post-hoc single-citation attachment with the hashing embedder");
}
