#include "cmfmts.h"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>

#include "cmfmts/catalog.hpp"
#include "cmfmts/classifiers.hpp"
#include "cmfmts/dataset.hpp"
#include "cmfmts/errors.hpp"
#include "cmfmts/evaluation.hpp"
#include "cmfmts/extract.hpp"
#include "cmfmts/interpret.hpp"
#include "cmfmts/matrix.hpp"
#include "cmfmts/preprocess.hpp"

struct cmfmts_dataset {
  cmfmts::MTSDataset impl;
};
struct cmfmts_catalog {
  cmfmts::FeatureCatalog impl;
};
struct cmfmts_matrix {
  cmfmts::FeatureMatrix impl;
};
struct cmfmts_preproc {
  cmfmts::Preprocessor impl;
};
struct cmfmts_model {
  cmfmts::Model impl;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
cmfmts_status guarded(Fn&& fn) {
  try {
    fn();
    return CMFMTS_OK;
  } catch (const cmfmts::input_error& e) {
    g_last_error = e.what();
    return CMFMTS_ERR_INPUT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CMFMTS_ERR_COMPUTE;
  } catch (...) {
    g_last_error = "unknown error";
    return CMFMTS_ERR_COMPUTE;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw cmfmts::input_error(std::string("null ") + what);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cmfmts::input_error("cannot write '" + path + "'");
  out << text;
}

} // namespace

extern "C" {

const char* cmfmts_version(void) { return "0.1.0"; }

const char* cmfmts_last_error(void) { return g_last_error.c_str(); }

/* ------------------------------ datasets ------------------------------ */

cmfmts_status cmfmts_dataset_load(const char* path, cmfmts_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "output handle");
    *out = new cmfmts_dataset{cmfmts::load_dataset_file(path)};
  });
}

cmfmts_status cmfmts_dataset_parse_ts(const char* text, const char* name,
                                      cmfmts_dataset** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "output handle");
    *out = new cmfmts_dataset{cmfmts::parse_ts(text, name ? name : "")};
  });
}

cmfmts_status cmfmts_dataset_strip_padding(const cmfmts_dataset* in, cmfmts_dataset** out) {
  return guarded([&] {
    require(in, "dataset");
    require(out, "output handle");
    *out = new cmfmts_dataset{cmfmts::strip_padding(in->impl)};
  });
}

cmfmts_status cmfmts_dataset_write(const cmfmts_dataset* ds, const char* path) {
  return guarded([&] {
    require(ds, "dataset");
    require(path, "path");
    cmfmts::write_dataset_file(ds->impl, path);
  });
}

int64_t cmfmts_dataset_instances(const cmfmts_dataset* ds) {
  return ds ? static_cast<int64_t>(ds->impl.size()) : -1;
}

int64_t cmfmts_dataset_dims(const cmfmts_dataset* ds) {
  return ds ? static_cast<int64_t>(ds->impl.dims) : -1;
}

const char* cmfmts_dataset_name(const cmfmts_dataset* ds) {
  return ds ? ds->impl.name.c_str() : "";
}

void cmfmts_dataset_free(cmfmts_dataset* ds) { delete ds; }

/* ------------------------------ catalog ------------------------------- */

cmfmts_status cmfmts_catalog_create(const char* selection, cmfmts_catalog** out) {
  return guarded([&] {
    require(out, "output handle");
    *out = new cmfmts_catalog{
        cmfmts::catalog_from_selection(selection ? selection : "all")};
  });
}

int64_t cmfmts_catalog_size(const cmfmts_catalog* c) {
  return c ? static_cast<int64_t>(c->impl.size()) : -1;
}

cmfmts_status cmfmts_catalog_hash(const cmfmts_catalog* c, char* buf, size_t buf_size) {
  return guarded([&] {
    require(c, "catalog");
    require(buf, "buffer");
    const std::string h = c->impl.hash();
    if (buf_size < h.size() + 1) throw cmfmts::input_error("hash buffer too small");
    std::snprintf(buf, buf_size, "%s", h.c_str());
  });
}

cmfmts_status cmfmts_catalog_reference(const cmfmts_catalog* c, const char* path) {
  return guarded([&] {
    require(c, "catalog");
    require(path, "path");
    write_text_file(path, c->impl.reference_doc());
  });
}

void cmfmts_catalog_free(cmfmts_catalog* c) { delete c; }

/* ------------------------------ matrices ------------------------------ */

cmfmts_status cmfmts_extract(const cmfmts_dataset* ds, const cmfmts_catalog* c,
                             unsigned jobs, cmfmts_matrix** out) {
  return guarded([&] {
    require(ds, "dataset");
    require(c, "catalog");
    require(out, "output handle");
    *out = new cmfmts_matrix{cmfmts::extract_dataset(ds->impl, c->impl, jobs)};
  });
}

cmfmts_status cmfmts_matrix_read_csv(const char* path, cmfmts_matrix** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "output handle");
    *out = new cmfmts_matrix{cmfmts::read_feature_csv_file(path)};
  });
}

cmfmts_status cmfmts_matrix_write_csv(const cmfmts_matrix* m, const char* path) {
  return guarded([&] {
    require(m, "matrix");
    require(path, "path");
    cmfmts::write_feature_csv_file(m->impl, path);
  });
}

cmfmts_status cmfmts_matrix_na_log(const cmfmts_matrix* m, const char* path,
                                   int with_timestamp) {
  return guarded([&] {
    require(m, "matrix");
    require(path, "path");
    std::ostringstream out;
    if (with_timestamp) {
      const std::time_t now =
          std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
      char stamp[64];
      std::tm tm_utc{};
      gmtime_r(&now, &tm_utc);
      std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
      out << "# extracted " << stamp << "\n";
    }
    out << "column,na_count\n";
    const auto counts = m->impl.na_counts();
    for (std::size_t c = 0; c < counts.size(); ++c)
      out << m->impl.column_names()[c] << ',' << counts[c] << "\n";
    write_text_file(path, out.str());
  });
}

int64_t cmfmts_matrix_rows(const cmfmts_matrix* m) {
  return m ? static_cast<int64_t>(m->impl.rows()) : -1;
}

int64_t cmfmts_matrix_cols(const cmfmts_matrix* m) {
  return m ? static_cast<int64_t>(m->impl.cols()) : -1;
}

void cmfmts_matrix_free(cmfmts_matrix* m) { delete m; }

/* ---------------------------- preprocessing --------------------------- */

cmfmts_status cmfmts_sanitize(const cmfmts_matrix* in, cmfmts_matrix** out) {
  return guarded([&] {
    require(in, "matrix");
    require(out, "output handle");
    *out = new cmfmts_matrix{cmfmts::sanitize(in->impl)};
  });
}

cmfmts_status cmfmts_preproc_fit(const cmfmts_matrix* train, cmfmts_preproc** out) {
  return guarded([&] {
    require(train, "matrix");
    require(out, "output handle");
    *out = new cmfmts_preproc{cmfmts::Preprocessor::fit(train->impl)};
  });
}

cmfmts_status cmfmts_preproc_transform(const cmfmts_preproc* p, const cmfmts_matrix* in,
                                       int is_train, int use_train_means,
                                       cmfmts_matrix** out) {
  return guarded([&] {
    require(p, "preprocessor");
    require(in, "matrix");
    require(out, "output handle");
    const auto mode = use_train_means ? cmfmts::ImputationMode::TrainMeans
                                      : cmfmts::ImputationMode::OwnColumnMeans;
    *out = new cmfmts_matrix{p->impl.transform(in->impl, is_train != 0, mode)};
  });
}

cmfmts_status cmfmts_preproc_save(const cmfmts_preproc* p, const char* path) {
  return guarded([&] {
    require(p, "preprocessor");
    require(path, "path");
    p->impl.save(path);
  });
}

cmfmts_status cmfmts_preproc_load(const char* path, cmfmts_preproc** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "output handle");
    *out = new cmfmts_preproc{cmfmts::Preprocessor::load(path)};
  });
}

void cmfmts_preproc_free(cmfmts_preproc* p) { delete p; }

/* ------------------------------- models ------------------------------- */

cmfmts_status cmfmts_model_fit(const cmfmts_matrix* train, const char* params_json,
                               unsigned jobs, const char* dataset_name, int64_t dims,
                               const cmfmts_catalog* catalog, cmfmts_model** out) {
  return guarded([&] {
    require(train, "matrix");
    require(params_json, "params");
    require(out, "output handle");
    cmfmts::ModelMeta meta;
    if (dataset_name) meta.dataset = dataset_name;
    if (dims > 0) meta.dims = static_cast<std::size_t>(dims);
    if (catalog) meta.catalog = catalog->impl.names();
    *out = new cmfmts_model{
        cmfmts::Model::fit(train->impl, params_json, jobs, std::move(meta))};
  });
}

cmfmts_status cmfmts_model_save(const cmfmts_model* m, const char* path) {
  return guarded([&] {
    require(m, "model");
    require(path, "path");
    m->impl.save(path);
  });
}

cmfmts_status cmfmts_model_load(const char* path, cmfmts_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "output handle");
    *out = new cmfmts_model{cmfmts::Model::load(path)};
  });
}

const char* cmfmts_model_type(const cmfmts_model* m) {
  return m ? m->impl.type().c_str() : "";
}

cmfmts_status cmfmts_model_predict_csv(const cmfmts_model* m, const cmfmts_matrix* data,
                                       const char* path) {
  return guarded([&] {
    require(m, "model");
    require(data, "matrix");
    require(path, "path");
    const std::vector<std::string> pred = m->impl.predict(data->impl);
    std::ostringstream out;
    out << "id,prediction,truth\n";
    for (std::size_t r = 0; r < pred.size(); ++r)
      out << data->impl.ids()[r] << ',' << pred[r] << ',' << data->impl.labels()[r] << "\n";
    write_text_file(path, out.str());
  });
}

cmfmts_status cmfmts_model_accuracy(const cmfmts_model* m, const cmfmts_matrix* data,
                                    double* out) {
  return guarded([&] {
    require(m, "model");
    require(data, "matrix");
    require(out, "output");
    *out = cmfmts::accuracy(m->impl.predict(data->impl), data->impl.labels());
  });
}

cmfmts_status cmfmts_model_importance_csv(const cmfmts_model* m, const char* path) {
  return guarded([&] {
    require(m, "model");
    require(path, "path");
    const auto importance = m->impl.importance();
    if (!importance)
      throw cmfmts::compute_error("model '" + m->impl.type() + "' carries no importance");
    std::ostringstream out;
    out << "column,name,importance\n";
    char buf[64];
    for (std::size_t c = 0; c < importance->size(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", (*importance)[c]);
      out << (c + 1) << ',' << m->impl.columns()[c] << ',' << buf << "\n";
    }
    write_text_file(path, out.str());
  });
}

void cmfmts_model_free(cmfmts_model* m) { delete m; }

/* ----------------------------- evaluation ----------------------------- */

cmfmts_status cmfmts_rank(const char* results_csv_path, double alpha,
                          const char* summary_path, const char* cd_path) {
  return guarded([&] {
    require(results_csv_path, "results path");
    require(summary_path, "summary path");
    require(cd_path, "cd path");
    const cmfmts::ResultsTable table = cmfmts::read_results_csv_file(results_csv_path);
    write_text_file(summary_path, cmfmts::summary_csv(table));
    write_text_file(cd_path, cmfmts::cd_diagram_csv(table, alpha));
  });
}

cmfmts_status cmfmts_importance_report(const char* const* model_paths, size_t count,
                                       int sample_variance, const char* out_dir) {
  return guarded([&] {
    require(model_paths, "model paths");
    require(out_dir, "output directory");
    if (count == 0) throw cmfmts::input_error("no model paths given");
    std::vector<cmfmts::DatasetImportance> inputs;
    inputs.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      require(model_paths[i], "model path");
      const cmfmts::Model model = cmfmts::Model::load(model_paths[i]);
      inputs.push_back(cmfmts::dataset_importance_from_model(model));
    }
    const cmfmts::ImportanceReport report =
        cmfmts::build_importance_report(inputs, sample_variance != 0);
    const std::string dir(out_dir);
    write_text_file(dir + "/heatmap.csv", cmfmts::heatmap_csv(report));
    write_text_file(dir + "/heatmap_ordered.csv", cmfmts::ordered_heatmap_csv(report));
    write_text_file(dir + "/feature_average.csv", cmfmts::feature_average_csv(report));
    write_text_file(dir + "/variable_importance.csv",
                    cmfmts::variable_importance_csv(report));
    write_text_file(dir + "/variable_stats.csv", cmfmts::variable_stats_csv(report));
    std::ostringstream flags;
    flags << "dataset,degenerate_spread\n";
    for (std::size_t d = 0; d < report.datasets.size(); ++d)
      flags << report.datasets[d] << ',' << (report.per_dataset[d].degenerate ? 1 : 0)
            << "\n";
    write_text_file(dir + "/flags.csv", flags.str());
  });
}

} // extern "C"
