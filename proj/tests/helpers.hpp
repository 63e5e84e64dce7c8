#pragma once

#include <nnefx/nnefx.hpp>

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testutil {

inline std::string models_dir() { return NNEFX_MODELS_DIR; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nnefx::NnefProgram load_model(const std::string& file) {
  return nnefx::parse_program(slurp(models_dir() + "/" + file));
}

inline nnefx::Tensor random_tensor(const nnefx::Shape& shape, std::mt19937& rng, float scale = 1.0f) {
  nnefx::Tensor t(shape);
  std::uniform_real_distribution<float> d(-scale, scale);
  for (auto& v : t.values()) v = d(rng);
  return t;
}

// Weight stores are keyed by label, inputs by external name.
inline nnefx::WeightStore random_weights(const nnefx::NnefProgram& program, std::mt19937& rng) {
  nnefx::ShapeMap shapes = nnefx::infer_shapes(program);
  nnefx::WeightStore store;
  for (const auto& instr : program.instructions)
    if (instr.op == nnefx::Op::Variable)
      store[instr.str_arg(1)] = random_tensor(shapes.at(instr.result), rng);
  return store;
}

inline nnefx::TensorMap random_inputs(const nnefx::NnefProgram& program, std::mt19937& rng) {
  nnefx::ShapeMap shapes = nnefx::infer_shapes(program);
  nnefx::TensorMap inputs;
  for (const auto& instr : program.instructions)
    if (instr.op == nnefx::Op::External)
      inputs[instr.result] = random_tensor(shapes.at(instr.result), rng);
  return inputs;
}

inline std::vector<nnefx::ItemProgram> load_split(const std::string& model_file,
                                                  const std::string& assignment_file) {
  nnefx::NnefProgram program = load_model(model_file);
  nnefx::Assignment assignment = nnefx::read_assignment_file(models_dir() + "/" + assignment_file);
  return nnefx::split(program, assignment);
}

}  // namespace testutil
