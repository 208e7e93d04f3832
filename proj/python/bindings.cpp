#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wastebench/audit.hpp"
#include "wastebench/bench.hpp"
#include "wastebench/errors.hpp"
#include "wastebench/parallel.hpp"
#include "wastebench/synth.hpp"

namespace py = pybind11;
using namespace wastebench;
using json = nlohmann::json;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DoubleArray& a) {
    if (a.ndim() != 2) throw ValidationError("expected a 2-d array");
    Matrix X(a.shape(0), a.shape(1));
    std::copy(a.data(), a.data() + a.size(), X.data());
    return X;
}

Labels to_labels(const IntArray& a) {
    if (a.ndim() != 1) throw ValidationError("expected a 1-d label array");
    return Labels(a.data(), a.data() + a.size());
}

py::array_t<double> from_matrix(const Matrix& X) {
    py::array_t<double> out({X.rows(), X.cols()});
    std::copy(X.data(), X.data() + X.size(), out.mutable_data());
    return out;
}

ImageBuffer to_image(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 3 || a.shape(2) != 3) throw ValidationError("expected an H x W x 3 uint8 array");
    ImageBuffer img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::copy(a.data(), a.data() + a.size(), img.pixels.begin());
    return img;
}

py::array_t<std::uint8_t> from_image(const ImageBuffer& img) {
    py::array_t<std::uint8_t> out({img.height, img.width, 3});
    std::copy(img.pixels.begin(), img.pixels.end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of the wastebench workbench";

    auto base = py::register_exception<Error>(m, "WastebenchError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DecodeError>(m, "DecodeError", base.ptr());
    py::register_exception<FormatError>(m, "FormatError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<LayoutError>(m, "LayoutError", base.ptr());
    py::register_exception<DegenerateInput>(m, "DegenerateInput", base.ptr());
    py::register_exception<InitError>(m, "InitError", base.ptr());
    py::register_exception<StratificationError>(m, "StratificationError", base.ptr());
    py::register_exception<TrainingError>(m, "TrainingError", base.ptr());

    m.attr("HANDCRAFTED_DIM") = kHandcraftedDim;
    m.def("block_layout", [] {
        std::vector<std::pair<std::string, std::size_t>> out;
        for (auto k : kCanonicalOrder) out.emplace_back(std::string(block_name(k)), block_dim(k));
        return out;
    });
    m.def("set_worker_count", &set_worker_count, py::arg("n"));

    m.def("synth_image", [](int class_id, std::uint64_t seed, int side) { return from_image(synth_image(class_id, seed, side)); },
          py::arg("class_id"), py::arg("seed"), py::arg("side") = 128);
    m.def(
        "write_synth_corpus",
        [](const std::filesystem::path& root, int classes, int per_class, int side, std::uint64_t seed) {
            return write_synth_corpus(root, SynthOptions{classes, per_class, side, seed});
        },
        py::arg("root"), py::arg("classes") = 3, py::arg("per_class") = 100, py::arg("side") = 128, py::arg("seed") = 0);

    m.def(
        "extract_image",
        [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& img, const std::string& segment) {
            const HandcraftedVector v = extract_image(to_image(img), parse_segment_mode(segment));
            py::array_t<double> out(v.flat.size());
            std::copy(v.flat.begin(), v.flat.end(), out.mutable_data());
            return py::make_tuple(out, v.flagged_blocks());
        },
        py::arg("image"), py::arg("segment") = "grabcut");

    m.def("read_matrix", [](const std::filesystem::path& path) {
        const FeatureMatrix fm = read_matrix(path);
        py::array_t<float> values({fm.n, fm.d});
        std::copy(fm.values.begin(), fm.values.end(), values.mutable_data());
        return py::make_tuple(values, fm.sample_ids, fm.source_tag);
    });
    m.def(
        "write_matrix",
        [](const std::filesystem::path& path, const py::array_t<float, py::array::c_style | py::array::forcecast>& values,
           const std::vector<std::string>& ids, const std::string& tag) {
            if (values.ndim() != 2) throw ValidationError("expected a 2-d array");
            FeatureMatrix fm;
            fm.n = static_cast<std::uint32_t>(values.shape(0));
            fm.d = static_cast<std::uint32_t>(values.shape(1));
            fm.values.assign(values.data(), values.data() + values.size());
            fm.sample_ids = ids;
            fm.source_tag = tag;
            write_matrix(fm, path);
        },
        py::arg("path"), py::arg("values"), py::arg("sample_ids"), py::arg("source_tag") = "");

    m.def("focal_loss", &focal_loss, py::arg("p_t"), py::arg("gamma"), py::arg("alpha"));

    py::class_<TrainedModel>(m, "Model")
        .def_property_readonly("class_count", [](const TrainedModel& t) { return t.class_count; })
        .def_property_readonly("feature_dim", [](const TrainedModel& t) { return t.feature_dim; })
        .def_property_readonly("label", [](const TrainedModel& t) { return t.spec.label(); })
        .def("predict", [](const TrainedModel& t, const DoubleArray& X) { return t.predict_all(to_matrix(X)); })
        .def("predict_proba", [](const TrainedModel& t, const DoubleArray& X) { return from_matrix(t.score_all(to_matrix(X))); })
        .def("to_json", [](const TrainedModel& t) { return t.to_json().dump(); })
        .def_static("from_json", [](const std::string& s) {
            try {
                return TrainedModel::from_json(json::parse(s));
            } catch (const json::exception& e) {
                throw FormatError(e.what());
            }
        });

    m.def(
        "train",
        [](const std::string& spec_json, const DoubleArray& X, const IntArray& y, std::uint64_t seed, int class_count) {
            return train(spec_from_json(json::parse(spec_json)), to_matrix(X), to_labels(y), seed, class_count);
        },
        py::arg("spec_json"), py::arg("X"), py::arg("y"), py::arg("seed") = 0, py::arg("class_count") = 0);

    m.def(
        "rank_embedded",
        [](const DoubleArray& X, const IntArray& y, int trees, std::uint64_t seed) {
            return rank_embedded_rf(to_matrix(X), to_labels(y), trees, seed).to_json().dump();
        },
        py::arg("X"), py::arg("y"), py::arg("trees") = 200, py::arg("seed") = 0);

    m.def(
        "evaluate",
        [](const IntArray& truth, const IntArray& pred, int classes) {
            const auto cm = confusion(to_labels(truth), to_labels(pred), classes);
            EvalReport r;
            r.confusion = cm;
            r.macro = summarize(cm, Averaging::Macro);
            r.weighted = summarize(cm, Averaging::Weighted);
            return r.to_json().dump();
        },
        py::arg("truth"), py::arg("pred"), py::arg("classes"));

    m.def(
        "audit",
        [](const DoubleArray& X, const IntArray& y, int folds, const std::string& spec_json, std::uint64_t seed) {
            std::vector<py::tuple> out;
            for (const auto& f : audit_labels(to_matrix(X), to_labels(y), folds, spec_from_json(json::parse(spec_json)), seed))
                out.push_back(py::make_tuple(f.index, f.stored_label, f.predicted, f.confidence));
            return out;
        },
        py::arg("X"), py::arg("y"), py::arg("folds"), py::arg("spec_json"), py::arg("seed") = 0);

    m.def("run_plan", [](const std::filesystem::path& plan_path) {
        return run_experiment(ExperimentPlan::load(plan_path)).combined_csv();
    });
}
