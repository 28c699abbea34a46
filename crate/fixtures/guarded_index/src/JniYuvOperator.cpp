// JniYuvOperator.cpp source file
JNIEXPORT
void JNICALL Java_YuvOperator_jniRotate
    (JNIEnv *env, jobject obj,  jobject handle) {
    JniYuvOperator *yuvOperator = 
        env->GetDirectBufferAddress(handle); 
    char *yuv = yuvOperator->_yuvData;
    int width = yuvOperator->_width;
    std::vector<unsigned char> yuvCopy(yuv); 
    int n = 0;
    for (int i = 0; i < width; i++) {
       if (width * i < (int)yuvCopy.size()) {
           yuv[n++] = yuvCopy[width * i];
       }
    } 
}
