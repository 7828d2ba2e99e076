#include "cmfmts/extract.hpp"

#include <atomic>
#include <mutex>
#include <thread>

#include "cmfmts/errors.hpp"
#include "cmfmts/features.hpp"

namespace cmfmts {

std::vector<std::string> feature_column_names(std::size_t dims, const FeatureCatalog& catalog) {
  std::vector<std::string> names;
  names.reserve(dims * catalog.size());
  for (std::size_t d = 1; d <= dims; ++d)
    for (const FeatureDescriptor& f : catalog.descriptors())
      names.push_back("var" + std::to_string(d) + "_" + f.name);
  return names;
}

FeatureMatrix extract_dataset(const MTSDataset& dataset, const FeatureCatalog& catalog,
                              unsigned jobs) {
  const std::size_t n = dataset.instances.size();
  const std::size_t j = catalog.size();
  FeatureMatrix m(feature_column_names(dataset.dims, catalog), n);

  auto work = [&](std::size_t i) {
    const MTSInstance& inst = dataset.instances[i];
    if (inst.channels.size() != dataset.dims)
      throw input_error("instance '" + inst.id + "' has " +
                        std::to_string(inst.channels.size()) + " channels, dataset has " +
                        std::to_string(dataset.dims));
    m.id(i) = inst.id;
    m.label(i) = inst.label;
    for (std::size_t d = 0; d < dataset.dims; ++d) {
      std::vector<double> values = extract_features(inst.channels[d], catalog);
      for (std::size_t f = 0; f < j; ++f) m.at(i, d * j + f) = values[f];
    }
  };

  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return m;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto runner = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        work(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = std::min<std::size_t>(jobs, n);
  pool.reserve(count);
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(runner);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return m;
}

} // namespace cmfmts
