// JniYuvOperator.h
class JniYuvOperator {
public:
    char *_yuvData;
    int _width;
};
