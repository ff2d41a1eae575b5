#include "prunefield/checkpoint.hpp"
#include "prunefield/encoding.hpp"
#include "prunefield/errors.hpp"
#include "prunefield/metrics.hpp"
#include "prunefield/mlp.hpp"
#include "prunefield/pipeline.hpp"
#include "prunefield/pruning.hpp"
#include "prunefield/train.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

namespace py = pybind11;
using namespace prunefield;

namespace {

using ImageArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

RgbImage to_image(const ImageArray& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw ShapeError("image array must be (height, width, 3)");
  RgbImage img(static_cast<std::size_t>(a.shape(1)), static_cast<std::size_t>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), img.data.begin());
  return img;
}

ImageArray from_image(const RgbImage& img) {
  ImageArray a({img.height, img.width, std::size_t{3}});
  std::copy(img.data.begin(), img.data.end(), a.mutable_data());
  return a;
}

py::dict prune_report_dict(const PruneReport& r) {
  py::dict d;
  d["strategy"] = std::string(to_string(r.strategy));
  d["threshold"] = r.threshold;
  d["target_width"] = r.target_width;
  d["edges_before"] = r.edges_before;
  d["edges_after"] = r.edges_after;
  d["params_before"] = r.params_before;
  d["params_after"] = r.params_after;
  d["remaining_edge_pct"] = r.remaining_edge_pct();
  return d;
}

py::dict report_dict(const ExperimentReport& r) {
  py::dict d;
  d["label"] = r.label;
  d["strategy"] = r.strategy;
  d["params"] = r.params;
  d["size_bytes"] = r.size_bytes;
  d["psnr"] = r.psnr.is_infinite() ? std::numeric_limits<double>::infinity() : r.psnr.db();
  d["mse"] = r.mse;
  d["sec_per_iter"] = r.sec_per_iter;
  d["remaining_edge_pct"] = r.remaining_edge_pct;
  return d;
}

RunConfig config_from(const py::dict& d) {
  const py::module_ json = py::module_::import("json");
  return RunConfig::from_json(nlohmann::json::parse(json.attr("dumps")(d).cast<std::string>()));
}

double psnr_value(const Psnr& p) {
  return p.is_infinite() ? std::numeric_limits<double>::infinity() : p.db();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Coordinate MLP training and pruning";

  static py::exception<InvalidArgument> invalid(m, "InvalidArgument", PyExc_ValueError);
  static py::exception<ShapeError> shape(m, "ShapeError", PyExc_ValueError);
  static py::exception<ParseError> parse(m, "ParseError", PyExc_ValueError);
  static py::exception<DegenerateDistribution> degenerate(m, "DegenerateDistribution", PyExc_ValueError);
  static py::exception<IoError> io(m, "IoError", PyExc_OSError);
  static py::exception<ContractError> contract(m, "ContractError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      PyErr_SetString(parse.ptr(), e.what());
    } catch (const ShapeError& e) {
      PyErr_SetString(shape.ptr(), e.what());
    } catch (const InvalidArgument& e) {
      PyErr_SetString(invalid.ptr(), e.what());
    } catch (const DegenerateDistribution& e) {
      PyErr_SetString(degenerate.ptr(), e.what());
    } catch (const IoError& e) {
      PyErr_SetString(io.ptr(), e.what());
    } catch (const ContractError& e) {
      PyErr_SetString(contract.ptr(), e.what());
    }
  });

  py::enum_<Strategy>(m, "Strategy")
      .value("edge", Strategy::edge)
      .value("uniform", Strategy::uniform)
      .value("importance_in", Strategy::importance_in)
      .value("importance_out", Strategy::importance_out)
      .value("importance_product", Strategy::importance_product)
      .value("coreset", Strategy::coreset);

  py::class_<ArchSpec>(m, "ArchSpec")
      .def_static("proxy", &ArchSpec::proxy, py::arg("width") = 256, py::arg("depth") = 8,
                  py::arg("skip_at") = 4, py::arg("n_freqs") = 10)
      .def_static("nerf_replica", &ArchSpec::nerf_replica, py::arg("width") = 256)
      .def_readonly("input_dim", &ArchSpec::input_dim)
      .def_readonly("n_freqs", &ArchSpec::n_freqs)
      .def_readonly("depth", &ArchSpec::depth)
      .def_readonly("widths", &ArchSpec::widths)
      .def_readonly("skip_at", &ArchSpec::skip_at)
      .def_readonly("output_dim", &ArchSpec::output_dim)
      .def_readonly("view_branch", &ArchSpec::view_branch)
      .def_readonly("frozen", &ArchSpec::frozen)
      .def("encoded_dim", &ArchSpec::encoded_dim)
      .def("param_count", [](const ArchSpec& a) { return arch_param_count(a); })
      .def(py::self == py::self);

  py::class_<MlpModel>(m, "Model")
      .def_readonly("arch", &MlpModel::arch)
      .def_readonly("provenance", &MlpModel::provenance)
      .def_property_readonly("num_layers", [](const MlpModel& mdl) { return mdl.layers.size(); })
      .def("weights", [](const MlpModel& mdl, std::size_t k) { return mdl.layers.at(k).weights; })
      .def("biases", [](const MlpModel& mdl, std::size_t k) { return mdl.layers.at(k).biases; })
      .def("set_weights",
           [](MlpModel& mdl, std::size_t k, const Matrix& w) {
             if (w.rows() != mdl.layers.at(k).weights.rows() || w.cols() != mdl.layers.at(k).weights.cols()) {
               throw ShapeError("set_weights: shape mismatch");
             }
             mdl.layers[k].weights = w;
           })
      .def("param_count", [](const MlpModel& mdl) { return param_count(mdl); })
      .def("size_bytes", [](const MlpModel& mdl) { return model_size_bytes(mdl); })
      .def("edge_count", [](const MlpModel& mdl) { return edge_count(mdl); });

  m.def("init_model", [](const ArchSpec& a, std::uint64_t seed) {
    RngStream rng(seed);
    return init_model(a, rng);
  }, py::arg("arch"), py::arg("seed") = 0);
  m.def("positional_encode",
        [](const Matrix& p, std::size_t n_freqs, bool include_input) {
          return positional_encode(p, n_freqs, include_input);
        },
        py::arg("points"), py::arg("n_freqs"), py::arg("include_input") = true);
  m.def("predict", &predict, py::arg("model"), py::arg("coords"));
  m.def("render", [](const MlpModel& mdl, std::size_t w, std::size_t h) {
    return from_image(render_image(mdl, w, h));
  }, py::arg("model"), py::arg("width"), py::arg("height"));

  m.def("train",
        [](const MlpModel& mdl, const ImageArray& image, std::size_t iterations, std::size_t batch_size,
           double lr, std::uint64_t seed) {
          TrainConfig cfg;
          cfg.iterations = iterations;
          cfg.batch_size = batch_size;
          cfg.adam.lr = lr;
          cfg.seed = seed;
          const PixelDataset data = dataset_from_image(to_image(image));
          TrainResult r;
          {
            py::gil_scoped_release release;
            r = train(mdl, data, cfg);
          }
          py::list log;
          for (const auto& e : r.log) log.append(py::make_tuple(e.iteration, e.loss));
          return py::make_tuple(r.model, log, r.sec_per_iter);
        },
        py::arg("model"), py::arg("image"), py::arg("iterations") = 1000, py::arg("batch_size") = 256,
        py::arg("lr") = 5e-4, py::arg("seed") = 0,
        "Returns (trained model, [(iteration, loss)], mean seconds per iteration).");

  m.def("load_ppm", [](const std::filesystem::path& p) { return from_image(load_ppm(p)); });
  m.def("save_ppm", [](const ImageArray& a, const std::filesystem::path& p) { save_ppm(to_image(a), p); });
  m.def("mse", [](const ImageArray& a, const ImageArray& b) { return mse(to_image(a), to_image(b)); });
  m.def("psnr",
        [](const ImageArray& a, const ImageArray& b, double max_value) {
          return psnr_value(psnr(to_image(a), to_image(b), max_value));
        },
        py::arg("reference"), py::arg("candidate"), py::arg("max_value") = 1.0,
        "PSNR in dB; float('inf') for identical images.");

  m.def("prune_edges", [](const MlpModel& mdl, double threshold) {
    auto r = prune_edges(mdl, threshold);
    return py::make_tuple(r.model, prune_report_dict(r.report));
  });
  m.def("compute_importance", [](const MlpModel& mdl, std::size_t layer) {
    const auto s = compute_importance(mdl, layer);
    py::dict d;
    d["w_in"] = s.w_in;
    d["w_out"] = s.w_out;
    d["product"] = s.product;
    return d;
  });
  m.def("coreset_probabilities",
        [](const std::vector<double>& w_in, const std::vector<double>& w_out, double beta) {
          ImportanceScores s;
          s.w_in = w_in;
          s.w_out = w_out;
          s.product.resize(w_in.size());
          return coreset_probabilities(s, beta);
        },
        py::arg("w_in"), py::arg("w_out"), py::arg("beta") = 3.0);
  m.def("prune_model",
        [](const MlpModel& mdl, Strategy strategy, std::size_t target_width, double beta, bool reweight,
           std::uint64_t seed) {
          auto r = prune_model(mdl, {strategy, target_width, beta, reweight, seed});
          return py::make_tuple(r.model, prune_report_dict(r.report));
        },
        py::arg("model"), py::arg("strategy"), py::arg("target_width"), py::arg("beta") = 3.0,
        py::arg("reweight") = true, py::arg("seed") = 0);

  m.def("encode_checkpoint", [](const MlpModel& mdl) {
    const auto b = encode_checkpoint(mdl);
    return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
  });
  m.def("decode_checkpoint", [](const py::bytes& b) {
    const std::string s = b;
    return decode_checkpoint(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  });
  m.def("save_checkpoint", &save_checkpoint);
  m.def("load_checkpoint", &load_checkpoint);

  // File-producing commands; the config dict uses the JSON manifest keys.
  m.def("cmd_train", [](const py::dict& cfg) { return report_dict(cmd_train(config_from(cfg))); });
  m.def("cmd_prune", [](const std::filesystem::path& ckpt, const py::dict& cfg) {
    return prune_report_dict(cmd_prune(ckpt, config_from(cfg)));
  });
  m.def("cmd_retrain", [](const std::filesystem::path& ckpt, const py::dict& cfg) {
    return report_dict(cmd_retrain(ckpt, config_from(cfg)));
  });
  m.def("cmd_eval", [](const std::filesystem::path& ckpt, const std::filesystem::path& image,
                       const py::dict& cfg) { return report_dict(cmd_eval(ckpt, image, config_from(cfg))); });
  m.def("cmd_experiment", [](const py::dict& cfg) {
    py::list rows;
    for (const auto& r : cmd_experiment(config_from(cfg))) rows.append(report_dict(r));
    return rows;
  });
}
