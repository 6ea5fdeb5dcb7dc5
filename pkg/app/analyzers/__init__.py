# Analysis modules package
