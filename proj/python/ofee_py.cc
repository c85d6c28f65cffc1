#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ofee/codec.h"
#include "ofee/common.h"
#include "ofee/corpus.h"
#include "ofee/generation.h"
#include "ofee/metrics.h"
#include "ofee/run.h"
#include "ofee/selector.h"
#include "ofee/synthetic.h"

namespace py = pybind11;
using namespace ofee;

namespace {

py::object ToPython(const nlohmann::json &j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Ontology MakeOntology(const std::map<std::string, std::vector<std::string>> &m) {
  Ontology onto;
  for (const auto &[type, roles] : m) onto.roles_by_type[type] = roles;
  return onto;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Oracle-free event extraction: codec, selector, metrics, pipeline.";

  static py::exception<Error> error(m, "OfeeError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error &e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  py::class_<Trigger>(m, "Trigger")
      .def(py::init(&Trigger::Make), py::arg("word"), py::arg("event_type"))
      .def_readonly("word", &Trigger::word)
      .def_readonly("event_type", &Trigger::event_type)
      .def(py::self == py::self)
      .def("__repr__", [](const Trigger &t) { return "Trigger(" + EncodeTrigger(t) + ")"; });

  py::class_<ArgumentPair>(m, "ArgumentPair")
      .def(py::init(&ArgumentPair::Make), py::arg("role"), py::arg("entity"))
      .def_readonly("role", &ArgumentPair::role)
      .def_readonly("entity", &ArgumentPair::entity)
      .def(py::self == py::self)
      .def("__repr__", [](const ArgumentPair &a) {
        return "ArgumentPair(" + a.role + ", " + a.entity + ")";
      });

  py::class_<EventFrame>(m, "EventFrame")
      .def(py::init(&EventFrame::Make), py::arg("trigger"),
           py::arg("arguments") = std::vector<ArgumentPair>{})
      .def_readonly("trigger", &EventFrame::trigger)
      .def_readonly("arguments", &EventFrame::arguments)
      .def(py::self == py::self);

  py::class_<ContextInstance>(m, "ContextInstance")
      .def(py::init([](std::string doc_id, std::string context,
                       std::vector<EventFrame> frames) {
             return ContextInstance{std::move(doc_id), std::move(context),
                                    std::move(frames)};
           }),
           py::arg("doc_id"), py::arg("context"),
           py::arg("gold_frames") = std::vector<EventFrame>{})
      .def_readonly("doc_id", &ContextInstance::doc_id)
      .def_readonly("context", &ContextInstance::context)
      .def_readonly("gold_frames", &ContextInstance::gold_frames);

  m.def("build_trigger_prompt",
        [](const std::string &context) { return BuildTriggerPrompt(context); });
  m.def("build_argument_prompt",
        [](const std::string &context, const std::string &word) {
          return BuildArgumentPrompt(context, word);
        });
  m.def("encode_trigger_target", [](const std::vector<EventFrame> &frames) {
    return EncodeTriggerTarget(frames);
  });
  m.def("decode_trigger_candidate", [](const std::string &text) {
    auto d = DecodeTriggerCandidate(text);
    return py::make_tuple(d.items, d.warnings);
  });
  m.def("encode_argument_target",
        [](const EventFrame &frame,
           const std::map<std::string, std::vector<std::string>> &ontology) {
          return EncodeArgumentTarget(frame, MakeOntology(ontology));
        },
        py::arg("frame"), py::arg("ontology"));
  m.def("decode_argument_output", [](const std::string &text) {
    auto d = DecodeArgumentOutput(text);
    return py::make_tuple(d.items, d.warnings);
  });

  m.def("hinge_loss",
        [](const std::vector<double> &pos, const std::vector<double> &neg,
           double margin) { return HingeLoss(pos, neg, margin); },
        py::arg("pos_scores"), py::arg("neg_scores"), py::arg("margin"));
  m.def("softmax", [](const std::vector<double> &s) { return Softmax(s); });
  m.def("fuse_scores",
        [](const std::vector<double> &rank, const std::vector<double> &beam,
           double alpha) { return FuseScores(rank, beam, alpha); },
        py::arg("rank_scores"), py::arg("beam_scores"), py::arg("alpha"));
  m.def("select",
        [](const std::vector<double> &rank, const std::vector<double> &beam,
           double alpha, double theta) {
          SelectionConfig cfg{alpha, theta};
          cfg.Validate();
          if (rank.size() != beam.size()) {
            throw Error(ErrorKind::kInvalidArgument, "score lists differ in length");
          }
          CandidateList list;
          for (size_t i = 0; i < rank.size(); ++i) {
            TriggerCandidate c;
            c.beam_score = beam[i];
            c.rank_score = rank[i];
            list.candidates.push_back(c);
          }
          return SelectScored(list, cfg).selected;
        },
        py::arg("rank_scores"), py::arg("beam_scores"), py::arg("alpha") = 0.4,
        py::arg("theta") = 0.2,
        "Indices of candidates whose fused score exceeds theta.");

  m.def("f1_from_counts", [](long c, long p, long g) {
    auto prf = F1FromCounts(c, p, g);
    return py::make_tuple(prf.precision, prf.recall, prf.f1);
  });
  m.def("evaluate_corpus",
        [](const std::vector<Prediction> &predictions,
           const std::vector<ContextInstance> &gold) {
          return ToPython(EvaluateCorpus(predictions, gold).ToJson());
        },
        py::arg("predictions"), py::arg("gold"));
  m.def("load_corpus", [](const std::string &path) {
    auto loaded = LoadCorpus(path);
    return py::make_tuple(loaded.instances, ToPython(loaded.report.ToJson()));
  });

  py::class_<ToyBackend>(m, "ToyBackend")
      .def(py::init<>())
      .def("add",
           [](ToyBackend &b, const std::string &input, const std::string &text,
              double score) { b.Add(input, {text, score}); },
           py::arg("input"), py::arg("text"), py::arg("score"))
      .def("generate_topk",
           [](const ToyBackend &b, const std::string &input, int k) {
             std::vector<std::pair<std::string, double>> out;
             for (const auto &h : b.GenerateTopK(input, k)) out.emplace_back(h.text, h.score);
             return out;
           })
      .def("generate_greedy", &ToyBackend::GenerateGreedy)
      .def("trigger_candidates",
           [](const ToyBackend &b, const ContextInstance &inst, int beam_width) {
             GenerationConfig cfg;
             cfg.beam_width = beam_width;
             return ToPython(CandidateListToJson(GenerateTriggerCandidates(b, inst, cfg)));
           },
           py::arg("instance"), py::arg("beam_width") = 10);

  m.def("run_pipeline",
        [](const std::string &config, const std::string &run_dir) {
          EvalReport report;
          {
            py::gil_scoped_release release;
            report = Runner(RunConfig::Load(config), run_dir).Pipeline();
          }
          return ToPython(report.ToJson());
        },
        py::arg("config"), py::arg("run_dir"),
        "Runs every stage and returns the test-split report.");
  m.def("write_synthetic_bundle",
        [](const std::string &dir, int train, int dev, int test, uint64_t seed) {
          synthetic::WriteBundle(dir, {train, dev, test}, seed);
        },
        py::arg("dir"), py::arg("train") = 50, py::arg("dev") = 50,
        py::arg("test") = 50, py::arg("seed") = 2024);
}
