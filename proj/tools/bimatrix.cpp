#include <cstdio>

int main() { std::puts("bimatrix: placeholder"); }
