#include <mutex>

#include "iotbench/modeled_sut.hpp"
#include "iotbench/reference_store.hpp"

namespace iotbench::sut {

namespace {

struct Registry {
  std::mutex mu;
  std::map<std::string, AdapterFactory> factories;

  Registry() {
    factories["reference"] = [](const SutOptions& o) {
      return std::make_shared<ReferenceStore>(ReferenceStoreOptions::from(o));
    };
    factories["modeled"] = [](const SutOptions& o) {
      return std::make_shared<ModeledSut>(ModeledSutOptions::from(o));
    };
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

void register_adapter(const std::string& name, AdapterFactory factory) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.factories[name] = std::move(factory);
}

bool has_adapter(const std::string& name) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  return r.factories.count(name) > 0;
}

std::vector<std::string> adapter_names() {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  std::vector<std::string> out;
  for (const auto& [name, f] : r.factories) out.push_back(name);
  return out;
}

std::shared_ptr<SutAdapter> make_adapter(const std::string& name, const SutOptions& options) {
  AdapterFactory factory;
  {
    auto& r = registry();
    std::lock_guard lock(r.mu);
    auto it = r.factories.find(name);
    if (it == r.factories.end()) throw InvalidParameter("sut.adapter", "unknown adapter '" + name + "'");
    factory = it->second;
  }
  return factory(options);
}

}  // namespace iotbench::sut
