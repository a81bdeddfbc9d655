#include "psm/svg.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace psm::svg {

std::string num(double value) {
  if (!std::isfinite(value)) value = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

Document::Document(double width, double height) {
  out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
          "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\" font-family=\"sans-serif\">\n";
  rect(0, 0, width, height, {{"fill", "white"}});
}

void Document::indent() { out_.append(static_cast<std::size_t>(depth_) * 2, ' '); }

void Document::element(std::string_view name, const Attributes& attributes, std::string_view body) {
  indent();
  out_ += '<';
  out_ += name;
  for (const auto& [key, value] : attributes) out_ += ' ' + key + "=\"" + escape(value) + '"';
  if (body.empty()) {
    out_ += "/>\n";
  } else {
    out_ += '>';
    out_ += escape(body);
    out_ += "</";
    out_ += name;
    out_ += ">\n";
  }
}

void Document::open_group(const Attributes& attributes) {
  indent();
  out_ += "<g";
  for (const auto& [key, value] : attributes) out_ += ' ' + key + "=\"" + escape(value) + '"';
  out_ += ">\n";
  ++depth_;
}

void Document::close_group() {
  if (depth_ <= 1) throw std::logic_error("svg: close_group without open group");
  --depth_;
  indent();
  out_ += "</g>\n";
}

void Document::rect(double x, double y, double width, double height, const Attributes& style) {
  Attributes a = {{"x", num(x)}, {"y", num(y)}, {"width", num(width)}, {"height", num(height)}};
  a.insert(a.end(), style.begin(), style.end());
  element("rect", a);
}

void Document::line(double x1, double y1, double x2, double y2, const Attributes& style) {
  Attributes a = {{"x1", num(x1)}, {"y1", num(y1)}, {"x2", num(x2)}, {"y2", num(y2)}};
  a.insert(a.end(), style.begin(), style.end());
  element("line", a);
}

void Document::circle(double cx, double cy, double r, const Attributes& style) {
  Attributes a = {{"cx", num(cx)}, {"cy", num(cy)}, {"r", num(r)}};
  a.insert(a.end(), style.begin(), style.end());
  element("circle", a);
}

void Document::polyline(const std::vector<std::pair<double, double>>& points, const Attributes& style) {
  std::string coords;
  for (const auto& [x, y] : points) {
    if (!coords.empty()) coords += ' ';
    coords += num(x) + ',' + num(y);
  }
  Attributes a = {{"points", coords}, {"fill", "none"}};
  a.insert(a.end(), style.begin(), style.end());
  element("polyline", a);
}

void Document::text(double x, double y, std::string_view content, const Attributes& style) {
  Attributes a = {{"x", num(x)}, {"y", num(y)}};
  a.insert(a.end(), style.begin(), style.end());
  if (content.empty()) content = " ";
  element("text", a, content);
}

std::string Document::str() const {
  if (depth_ != 1) throw std::logic_error("svg: unclosed group");
  return out_ + "</svg>\n";
}

}  // namespace psm::svg
