#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace psm::svg {

using Attributes = std::vector<std::pair<std::string, std::string>>;

// Fixed-precision coordinate text so identical input renders byte-identical
// output.
std::string num(double value);
std::string escape(std::string_view text);

// Minimal streaming SVG writer. Elements are appended in call order; groups
// must be closed before str() is called.
class Document {
 public:
  Document(double width, double height);

  void open_group(const Attributes& attributes);
  void close_group();

  void rect(double x, double y, double width, double height, const Attributes& style);
  void line(double x1, double y1, double x2, double y2, const Attributes& style);
  void circle(double cx, double cy, double r, const Attributes& style);
  void polyline(const std::vector<std::pair<double, double>>& points, const Attributes& style);
  void text(double x, double y, std::string_view content, const Attributes& style);

  std::string str() const;

 private:
  void element(std::string_view name, const Attributes& attributes, std::string_view body = {});
  void indent();

  std::string out_;
  int depth_ = 1;
};

}  // namespace psm::svg
